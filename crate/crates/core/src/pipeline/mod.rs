//! Command to motion: code generation, validation, interpretation, waypoint
//! projection, planning and path following, with per-stage outcomes.

mod codegen;
mod run;

use serde::{Deserialize, Serialize};

pub use codegen::{
    assemble_prompt, chat_request, default_fixture_id, fixture_exists, generate_program, load_template, response_text,
    CodegenConfig, CodegenError, CodegenMode, DEFAULT_PROMPT_TEMPLATE, QUERY_MARKER,
};
pub use run::{run_command, run_command_at, Session};

use crate::evalharness::Category;
use crate::navlang::{SourceProgram, ValidationReport};
use crate::navruntime::{ExecutionTrace, NavResult, DEFAULT_STEP_BUDGET};
use crate::planner::{FollowerConfig, PlannedPath};
use crate::projection::{Mode, Waypoint, DEFAULT_STANDOFF};
use crate::worldsim::Pose;

pub const DEFAULT_OD_IOU: f64 = 0.5;
pub const DEFAULT_WP_DISTANCE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProgramSource {
    /// Fixture mode: the fixture named by [`default_fixture_id`]; live mode:
    /// the endpoint.
    #[default]
    Default,
    Fixture(String),
    Live,
}

fn mode_a() -> Mode {
    Mode::A
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavCommand {
    pub text: String,
    pub scene: String,
    /// Unset for ad-hoc operator commands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<Category>,
    #[serde(default = "mode_a")]
    pub representation: Mode,
    #[serde(default)]
    pub program_source: ProgramSource,
    /// Annotated target object id. When unset, detection is judged against
    /// the object the returned box was detected for.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

impl NavCommand {
    pub fn new(text: impl Into<String>, scene: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            scene: scene.into(),
            category: None,
            representation: Mode::A,
            program_source: ProgramSource::Default,
            target: None,
        }
    }

    pub fn fixture(mut self, id: impl Into<String>) -> Self {
        self.program_source = ProgramSource::Fixture(id.into());
        self
    }

    pub fn target(mut self, id: impl Into<String>) -> Self {
        self.target = Some(id.into());
        self
    }

    pub fn representation(mut self, mode: Mode) -> Self {
        self.representation = mode;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageOutcome {
    pub pass: bool,
    pub detail: String,
}

impl StageOutcome {
    pub fn pass(detail: impl Into<String>) -> Self {
        Self {
            pass: true,
            detail: detail.into(),
        }
    }

    pub fn fail(detail: impl Into<String>) -> Self {
        Self {
            pass: false,
            detail: detail.into(),
        }
    }

    pub fn skipped(after: &str) -> Self {
        Self::fail(format!("not attempted: {after} failed"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageOutcomes {
    pub code: StageOutcome,
    pub od: StageOutcome,
    pub wp: StageOutcome,
    pub path_exec: StageOutcome,
}

impl StageOutcomes {
    pub fn flags(&self) -> [bool; 4] {
        [self.code.pass, self.od.pass, self.wp.pass, self.path_exec.pass]
    }

    pub fn is_monotone(&self) -> bool {
        self.flags().windows(2).all(|w| w[0] || !w[1])
    }

    pub fn all_pass(&self) -> bool {
        self.path_exec.pass && self.is_monotone()
    }
}

/// Wall-clock milliseconds per stage; only recorded on request.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StageTimings {
    pub codegen_ms: f64,
    pub validate_ms: f64,
    pub execute_ms: f64,
    pub project_ms: f64,
    pub plan_ms: f64,
    pub follow_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FollowSummary {
    pub success: bool,
    pub sim_time: f64,
    /// Poses at every control step, initial pose first.
    pub trajectory: Vec<Pose>,
}

/// Everything one command produced. Optional parts are present exactly when
/// their stage was attempted: `trace` and `nav_result` once the program
/// validated, `waypoint` once detection passed, `path` and `follow` once the
/// waypoint passed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandReport {
    pub command: NavCommand,
    pub start_pose: Pose,
    pub program: Option<SourceProgram>,
    pub validation: Option<ValidationReport>,
    pub trace: Option<ExecutionTrace>,
    pub nav_result: Option<NavResult>,
    /// Object the detection and waypoint stages were judged against.
    pub target: Option<String>,
    pub waypoint: Option<Waypoint>,
    pub path: Option<PlannedPath>,
    pub follow: Option<FollowSummary>,
    /// Session pose after the command: the follower's final pose when every
    /// stage passed, otherwise the start pose.
    pub final_pose: Pose,
    pub stages: StageOutcomes,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<StageTimings>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub codegen: CodegenConfig,
    /// Seeds the planner's sampler.
    pub seed: u64,
    pub od_iou_threshold: f64,
    pub wp_max_distance: f64,
    pub standoff: f64,
    pub follower: FollowerConfig,
    pub step_budget: u64,
    pub record_timings: bool,
}

impl PipelineConfig {
    pub fn new(codegen: CodegenConfig, seed: u64) -> Self {
        Self {
            codegen,
            seed,
            od_iou_threshold: DEFAULT_OD_IOU,
            wp_max_distance: DEFAULT_WP_DISTANCE,
            standoff: DEFAULT_STANDOFF,
            follower: FollowerConfig::default(),
            step_budget: DEFAULT_STEP_BUDGET,
            record_timings: false,
        }
    }
}
