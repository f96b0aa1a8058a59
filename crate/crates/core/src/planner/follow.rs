use serde::{Deserialize, Serialize};

use super::PlannedPath;
use crate::worldsim::{step_robot, wrap_angle, Pose, RobotState, VelocityCommand};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FollowerConfig {
    pub lookahead: f64,
    pub speed: f64,
    pub dt: f64,
    /// Success radius around the last waypoint, m.
    pub tolerance: f64,
    /// The controller stops once this close to the last waypoint, m.
    pub stop_radius: f64,
    /// Heading error above which the robot turns in place, rad.
    pub turn_in_place: f64,
}

impl Default for FollowerConfig {
    fn default() -> Self {
        Self {
            lookahead: 0.6,
            speed: 1.0,
            dt: 0.05,
            tolerance: 0.3,
            stop_radius: 0.1,
            turn_in_place: std::f64::consts::FRAC_PI_3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FollowOutcome {
    pub final_state: RobotState,
    pub success: bool,
    pub sim_time: f64,
    /// Pose after every control step, starting with the initial pose.
    pub trajectory: Vec<Pose>,
}

struct Polyline {
    pts: Vec<[f64; 2]>,
    /// Cumulative arc length at each vertex.
    s: Vec<f64>,
}

impl Polyline {
    fn new(pts: Vec<[f64; 2]>) -> Self {
        let mut s = vec![0.0];
        for w in pts.windows(2) {
            let l = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
            s.push(s.last().unwrap() + l);
        }
        Self { pts, s }
    }

    fn total(&self) -> f64 {
        *self.s.last().unwrap()
    }

    fn at(&self, arc: f64) -> [f64; 2] {
        let arc = arc.clamp(0.0, self.total());
        for k in 0..self.pts.len().saturating_sub(1) {
            let l = self.s[k + 1] - self.s[k];
            if arc <= self.s[k + 1] && l > 0.0 {
                let t = (arc - self.s[k]) / l;
                let (a, b) = (self.pts[k], self.pts[k + 1]);
                return [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t];
            }
        }
        *self.pts.last().unwrap()
    }

    /// Arc length of the closest path point, never behind `s_min` and
    /// searched no further than `window` beyond it.
    fn project(&self, p: [f64; 2], s_min: f64, window: f64) -> f64 {
        let mut best = (f64::INFINITY, s_min);
        for k in 0..self.pts.len().saturating_sub(1) {
            if self.s[k + 1] < s_min || self.s[k] > s_min + window {
                continue;
            }
            let (a, b) = (self.pts[k], self.pts[k + 1]);
            let d = [b[0] - a[0], b[1] - a[1]];
            let l2 = d[0] * d[0] + d[1] * d[1];
            let t = if l2 > 0.0 {
                (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let q = [a[0] + d[0] * t, a[1] + d[1] * t];
            let dist = (p[0] - q[0]).hypot(p[1] - q[1]);
            let arc = (self.s[k] + t * l2.sqrt()).max(s_min);
            if dist < best.0 {
                best = (dist, arc);
            }
        }
        best.1
    }
}

/// Pure-pursuit tracking of `path` from `robot` using [`step_robot`].
pub fn follow_path(path: &PlannedPath, robot: &RobotState, cfg: &FollowerConfig) -> FollowOutcome {
    let line = Polyline::new(path.waypoints.iter().map(|w| [w.x, w.y]).collect());
    let end = *line.pts.last().expect("path must be non-empty");
    let speed = cfg.speed.min(robot.max_speed);
    let budget = 3.0 * (path.cost / speed) + 10.0;
    let mut state = *robot;
    let mut trajectory = vec![state.pose];
    let mut t = 0.0;
    let mut progress = 0.0;
    let dist_end = |s: &RobotState| (end[0] - s.pose.x).hypot(end[1] - s.pose.y);
    while t + cfg.dt <= budget + 1e-9 {
        let d_end = dist_end(&state);
        if d_end <= cfg.stop_radius {
            break;
        }
        let pos = [state.pose.x, state.pose.y];
        progress = line.project(pos, progress, 2.0 * cfg.lookahead);
        let target = if line.total() - progress <= cfg.lookahead {
            end
        } else {
            line.at(progress + cfg.lookahead)
        };
        let (dx, dy) = (target[0] - pos[0], target[1] - pos[1]);
        let ld = dx.hypot(dy).max(1e-9);
        let alpha = wrap_angle(dy.atan2(dx) - state.pose.yaw);
        let cmd = if alpha.abs() > cfg.turn_in_place {
            VelocityCommand {
                linear: 0.0,
                angular: robot.max_angular.copysign(alpha),
            }
        } else {
            let v = speed.min(2.0 * d_end);
            let omega = (v * 2.0 * alpha.sin() / ld).clamp(-robot.max_angular, robot.max_angular);
            VelocityCommand { linear: v, angular: omega }
        };
        state = step_robot(&state, cmd, cfg.dt);
        state.pose.yaw = wrap_angle(state.pose.yaw);
        trajectory.push(state.pose);
        t += cfg.dt;
    }
    FollowOutcome {
        success: dist_end(&state) <= cfg.tolerance,
        final_state: state,
        sim_time: t,
        trajectory,
    }
}
