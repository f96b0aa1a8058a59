//! Tree-walking interpreter for validated navigation programs.

mod interp;
mod patches;
mod result;
pub mod value;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use patches::{coerce_to_numeric, patch_distance, token_overlap};
pub use result::{resolve_nav_result, NavResult};
pub use value::{PatchId, Value};

use crate::geom::Rect;
use crate::navlang::NavAst;
use crate::projection::{Mode, ViewName};
use crate::worldsim::{ViewSet, World};

pub const DEFAULT_STEP_BUDGET: u64 = 100_000;
pub const DEFAULT_SEQUENCE_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuntimeError {
    #[error("step budget of {0} exhausted")]
    StepBudget(u64),
    #[error("sequence longer than {0} elements")]
    SequenceCap(usize),
    #[error("type error: {0}")]
    Type(String),
    #[error("name error: {0}")]
    Name(String),
    #[error("index error: {0}")]
    Index(String),
    #[error("key error: {0}")]
    Key(String),
    #[error("value error: {0}")]
    Value(String),
    #[error("division by zero")]
    ZeroDivision,
    #[error("{error} (line {line})")]
    At { line: u32, error: Box<RuntimeError> },
}

impl RuntimeError {
    pub fn root(&self) -> &RuntimeError {
        match self {
            RuntimeError::At { error, .. } => error.root(),
            e => e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExecConfig {
    pub mode: Mode,
    pub step_budget: u64,
    pub sequence_cap: usize,
}

impl ExecConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            step_budget: DEFAULT_STEP_BUDGET,
            sequence_cap: DEFAULT_SEQUENCE_CAP,
        }
    }
}

/// One entry of the patch registry. `frame` is `None` only for the merged
/// mode-B root and crops of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchRecord {
    pub id: usize,
    #[serde(rename = "box")]
    pub bounds: Rect,
    pub frame: Option<ViewName>,
    /// Object a `find` result was produced for.
    pub source_object: Option<String>,
    pub parent: Option<usize>,
    pub created_by: String,
}

impl PatchRecord {
    pub fn horizontal_center(&self) -> f64 {
        (self.bounds.left + self.bounds.right) / 2.0
    }

    pub fn vertical_center(&self) -> f64 {
        (self.bounds.lower + self.bounds.upper) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiCall {
    pub name: String,
    pub args: String,
    pub result: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub steps_used: u64,
    pub api_calls: Vec<ApiCall>,
    pub patch_registry: Vec<PatchRecord>,
    pub notes: Vec<String>,
    /// Python-style rendering of the value `execute_command` returned.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub returned: Option<String>,
}

impl ExecutionTrace {
    pub fn patch(&self, id: PatchId) -> &PatchRecord {
        &self.patch_registry[id.0]
    }
}

/// Runs `execute_command` over the views and normalizes its return value.
/// Runtime failures become a `None` result carrying the error message.
pub fn execute_program(
    ast: &NavAst,
    world: &World,
    views: &ViewSet,
    cfg: &ExecConfig,
) -> (NavResult, ExecutionTrace) {
    let mut it = interp::Interp::new(world, views, cfg);
    let outcome = it.run(ast);
    let mut trace = it.into_trace();
    let result = match outcome {
        Ok(v) => {
            trace.returned = Some(v.to_string());
            resolve_nav_result(&v, &mut trace, cfg.mode)
        }
        Err(e) => NavResult::failure(e.to_string()),
    };
    (result, trace)
}
