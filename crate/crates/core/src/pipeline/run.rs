use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::codegen::generate_program;
use super::{CommandReport, FollowSummary, NavCommand, PipelineConfig, StageOutcome, StageOutcomes, StageTimings};
use crate::geom::Rect;
use crate::navlang::{parse_program, validate_program};
use crate::navruntime::{execute_program, ExecConfig, ExecutionTrace, NavResult};
use crate::planner::{follow_path, plan_to_waypoint, NavGraph, PlannerConfig};
use crate::projection::{
    emplace_waypoint, pixel_to_ray, raycast_first_hit, PanoramaLayout, ViewName, WaypointStatus,
};
use crate::worldsim::{render_views, RobotState, ViewSet, World};

struct Clock(Option<Instant>);

impl Clock {
    fn start(on: bool) -> Self {
        Clock(on.then(Instant::now))
    }

    fn ms(&self) -> f64 {
        self.0.map_or(0.0, |t| t.elapsed().as_secs_f64() * 1e3)
    }
}

/// Ground-truth rectangles of `target` in the coordinate system of `frame`
/// ("panorama", a camera name, or `None` for the merged mode-B root).
fn ground_truth(views: &ViewSet, target: &str, frame: Option<&str>) -> Vec<Rect> {
    let layout = PanoramaLayout::STANDARD;
    views
        .frames
        .iter()
        .filter_map(|fv| {
            let r = fv.rect_of(target)?.rect;
            match frame.and_then(ViewName::parse) {
                Some(ViewName::Panorama) => Some(r.translate_x(layout.offset(fv.frame))),
                Some(ViewName::Frame(f)) => (f == fv.frame).then_some(r),
                None => Some(r),
            }
        })
        .collect()
}

/// Object the returned box was detected for, if any patch matches it exactly.
fn detected_object(nav: &NavResult, trace: &ExecutionTrace) -> Option<String> {
    let b = nav.rect()?;
    trace
        .patch_registry
        .iter()
        .filter(|p| p.bounds == b)
        .find_map(|p| p.source_object.clone())
}

fn code_outcome(nav: &NavResult) -> StageOutcome {
    if nav.is_navigation() {
        let [u, v] = nav.inputs.unwrap_or_default();
        StageOutcome::pass(format!(
            "navigate_to_object at ({u:.1}, {v:.1}) in {}",
            nav.frame.as_deref().unwrap_or("the merged frames")
        ))
    } else {
        StageOutcome::fail(nav.error.clone().unwrap_or_else(|| "no navigation result".into()))
    }
}

/// Runs the command from the scene's start pose.
pub fn run_command(cmd: &NavCommand, world: &World, cfg: &PipelineConfig) -> CommandReport {
    run_command_at(cmd, world, &world.scene.start_state(), cfg)
}

/// Runs the full stage chain from `robot`. Every failure is recorded as a
/// stage outcome; later stages are not attempted once one fails.
pub fn run_command_at(cmd: &NavCommand, world: &World, robot: &RobotState, cfg: &PipelineConfig) -> CommandReport {
    let mut timings = StageTimings::default();
    let mut report = CommandReport {
        command: cmd.clone(),
        start_pose: robot.pose,
        program: None,
        validation: None,
        trace: None,
        nav_result: None,
        target: None,
        waypoint: None,
        path: None,
        follow: None,
        final_pose: robot.pose,
        stages: StageOutcomes {
            code: StageOutcome::skipped("code generation"),
            od: StageOutcome::skipped("Code"),
            wp: StageOutcome::skipped("OD"),
            path_exec: StageOutcome::skipped("WP"),
        },
        timings: None,
    };
    let finish = |mut r: CommandReport, t: StageTimings| {
        if cfg.record_timings {
            r.timings = Some(t);
        }
        r
    };

    let clock = Clock::start(cfg.record_timings);
    let generated = generate_program(cmd, &cfg.codegen);
    timings.codegen_ms = clock.ms();
    let program = match generated {
        Ok(p) => p,
        Err(e) => {
            report.stages.code = StageOutcome::fail(e.to_string());
            return finish(report, timings);
        }
    };
    report.program = Some(program.clone());

    let clock = Clock::start(cfg.record_timings);
    let parsed = parse_program(&program);
    let ast = match parsed {
        Ok(a) => a,
        Err(e) => {
            timings.validate_ms = clock.ms();
            report.stages.code = StageOutcome::fail(e.to_string());
            return finish(report, timings);
        }
    };
    let validation = validate_program(&ast);
    timings.validate_ms = clock.ms();
    report.validation = Some(validation.clone());
    if !validation.ok {
        let first = validation.errors().next().map_or_else(String::new, |d| {
            format!(": {} (line {})", d.message, d.line)
        });
        report.stages.code = StageOutcome::fail(format!("validation failed{first}"));
        return finish(report, timings);
    }

    let clock = Clock::start(cfg.record_timings);
    let views = render_views(world, robot);
    let exec = ExecConfig {
        step_budget: cfg.step_budget,
        ..ExecConfig::new(cmd.representation)
    };
    let (nav, trace) = execute_program(&ast, world, &views, &exec);
    timings.execute_ms = clock.ms();
    report.stages.code = code_outcome(&nav);
    let target = cmd.target.clone().or_else(|| detected_object(&nav, &trace));
    report.nav_result = Some(nav.clone());
    report.trace = Some(trace);
    report.target = target.clone();
    if !report.stages.code.pass {
        return finish(report, timings);
    }

    // Detection: the returned box against the target's projection.
    let Some(target) = target else {
        report.stages.od = StageOutcome::fail("no annotated target and the box matches no detected object");
        return finish(report, timings);
    };
    let Some(object) = world.scene.object(&target) else {
        report.stages.od = StageOutcome::fail(format!("unknown target object {target}"));
        return finish(report, timings);
    };
    let rect = nav.rect().expect("navigation results carry a box");
    let iou = ground_truth(&views, &target, nav.frame.as_deref())
        .iter()
        .map(|g| rect.iou(g))
        .fold(0.0, f64::max);
    let od = format!("IoU {iou:.2} with {target}");
    if iou < cfg.od_iou_threshold {
        report.stages.od = StageOutcome::fail(od);
        return finish(report, timings);
    }
    report.stages.od = StageOutcome::pass(od);

    // Waypoint: ray through the box centre, first hit, standoff.
    let clock = Clock::start(cfg.record_timings);
    let Some(view) = nav.frame.as_deref().and_then(ViewName::parse) else {
        report.stages.wp = StageOutcome::fail("box is not attributable to a single view");
        return finish(report, timings);
    };
    let [u, v] = nav.inputs.expect("navigation results carry inputs");
    let projected = pixel_to_ray(u, v, view, world, robot).and_then(|ray| {
        raycast_first_hit(&ray, &world.map, world.rig.max_range).map(|hit| emplace_waypoint(&hit, &ray, &world.map, cfg.standoff))
    });
    timings.project_ms = clock.ms();
    let wp = match projected {
        Ok(w) => w,
        Err(e) => {
            report.stages.wp = StageOutcome::fail(e.to_string());
            return finish(report, timings);
        }
    };
    let dist = object.bbox.footprint_distance(wp.position.x, wp.position.y);
    report.waypoint = Some(wp.clone());
    let detail = format!(
        "{} at ({:.2}, {:.2}, {:.2}), {dist:.2} m from {target}",
        match wp.status {
            WaypointStatus::Hit => "hit",
            WaypointStatus::MapBoundary => "map boundary",
        },
        wp.position.x,
        wp.position.y,
        wp.position.z
    );
    if wp.status != WaypointStatus::Hit || dist > cfg.wp_max_distance {
        report.stages.wp = StageOutcome::fail(detail);
        return finish(report, timings);
    }
    report.stages.wp = StageOutcome::pass(detail);

    // Planning and execution.
    let clock = Clock::start(cfg.record_timings);
    let pcfg = PlannerConfig::for_robot(&robot.footprint, cfg.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut graph = NavGraph::default();
    let planned = plan_to_waypoint(&mut graph, robot, &wp, &world.map, &pcfg, &mut rng);
    timings.plan_ms = clock.ms();
    let path = match planned {
        Ok(p) => p,
        Err(e) => {
            report.stages.path_exec = StageOutcome::fail(e.to_string());
            return finish(report, timings);
        }
    };
    report.path = Some(path.clone());
    if !path.reached_goal {
        report.stages.path_exec = StageOutcome::fail(format!("goal not reached after {} replans", path.replans));
        return finish(report, timings);
    }
    let clock = Clock::start(cfg.record_timings);
    let out = follow_path(&path, robot, &cfg.follower);
    timings.follow_ms = clock.ms();
    let end = path.waypoints.last().expect("plans are non-empty");
    let miss = (end.x - out.final_state.pose.x).hypot(end.y - out.final_state.pose.y);
    report.follow = Some(FollowSummary {
        success: out.success,
        sim_time: out.sim_time,
        trajectory: out.trajectory,
    });
    if out.success {
        report.final_pose = out.final_state.pose;
        report.stages.path_exec = StageOutcome::pass(format!(
            "{} waypoints, cost {:.2} m, followed in {:.2} s",
            path.waypoints.len(),
            path.cost,
            out.sim_time
        ));
    } else {
        report.stages.path_exec = StageOutcome::fail(format!("follower stopped {miss:.2} m from the path end"));
    }
    finish(report, timings)
}

/// One robot in one world; commands run strictly in sequence and each
/// starts where the previous successful one left the robot.
#[derive(Debug, Clone)]
pub struct Session {
    pub world: World,
    pub robot: RobotState,
    pub commands_run: usize,
}

impl Session {
    pub fn new(world: World) -> Self {
        let robot = world.scene.start_state();
        Self {
            world,
            robot,
            commands_run: 0,
        }
    }

    pub fn run(&mut self, cmd: &NavCommand, cfg: &PipelineConfig) -> CommandReport {
        let report = run_command_at(cmd, &self.world, &self.robot, cfg);
        self.robot.pose = report.final_pose;
        self.commands_run += 1;
        report
    }

    pub fn reset(&mut self) {
        self.robot = self.world.scene.start_state();
        self.commands_run = 0;
    }
}
