use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Radians, counter-clockwise from +x.
    pub yaw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Footprint {
    pub width: f64,
    pub length: f64,
    pub height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub pose: Pose,
    pub footprint: Footprint,
    pub max_speed: f64,
    pub max_angular: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityCommand {
    pub linear: f64,
    pub angular: f64,
}

/// Unicycle step integrated exactly along the constant-curvature arc; with
/// zero angular rate this is `x += v cos(yaw) dt`, `y += v sin(yaw) dt`.
pub fn step_robot(state: &RobotState, cmd: VelocityCommand, dt: f64) -> RobotState {
    let p = state.pose;
    let (v, w) = (cmd.linear, cmd.angular);
    let yaw1 = p.yaw + w * dt;
    let (dx, dy) = if (w * dt).abs() < 1e-9 {
        let mid = p.yaw + w * dt / 2.0;
        (v * mid.cos() * dt, v * mid.sin() * dt)
    } else {
        (
            v / w * (yaw1.sin() - p.yaw.sin()),
            v / w * (p.yaw.cos() - yaw1.cos()),
        )
    };
    let mut out = *state;
    out.pose = Pose {
        x: p.x + dx,
        y: p.y + dy,
        yaw: yaw1,
    };
    out
}

pub fn wrap_angle(a: f64) -> f64 {
    let t = std::f64::consts::TAU;
    let mut r = a.rem_euclid(t);
    if r > std::f64::consts::PI {
        r -= t;
    }
    r
}
