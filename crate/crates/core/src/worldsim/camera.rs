use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geom::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Left,
    Front,
    Right,
}

impl Frame {
    /// Panorama order.
    pub const ALL: [Frame; 3] = [Frame::Left, Frame::Front, Frame::Right];

    pub fn name(self) -> &'static str {
        match self {
            Frame::Left => "left",
            Frame::Front => "front",
            Frame::Right => "right",
        }
    }

    pub fn parse(s: &str) -> Option<Frame> {
        Frame::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Pinhole intrinsics. Pixel `v` grows upward from the bottom row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub frame: Frame,
    pub yaw_offset: f64,
    pub width: u32,
    pub height: u32,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl CameraModel {
    pub fn with_hfov(frame: Frame, yaw_offset: f64, width: u32, height: u32, hfov: f64) -> Self {
        let f = width as f64 / 2.0 / (hfov / 2.0).tan();
        Self {
            frame,
            yaw_offset,
            width,
            height,
            fx: f,
            fy: f,
            cx: width as f64 / 2.0,
            cy: height as f64 / 2.0,
        }
    }

    pub fn vfov(&self) -> f64 {
        2.0 * (self.height as f64 / 2.0 / self.fy).atan()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraRig {
    pub cameras: [CameraModel; 3],
    pub mount_height: f64,
    pub max_range: f64,
    pub calibration_noise_deg: f64,
}

impl CameraRig {
    pub fn standard(mount_height: f64, calibration_noise_deg: f64) -> Self {
        let hfov = FRAC_PI_2;
        Self {
            cameras: [
                CameraModel::with_hfov(Frame::Left, FRAC_PI_2, 640, 480, hfov),
                CameraModel::with_hfov(Frame::Front, 0.0, 640, 480, hfov),
                CameraModel::with_hfov(Frame::Right, -FRAC_PI_2, 640, 480, hfov),
            ],
            mount_height,
            max_range: 30.0,
            calibration_noise_deg,
        }
    }

    pub fn camera(&self, frame: Frame) -> &CameraModel {
        &self.cameras[frame.index()]
    }
}

/// World pose of one camera: optical center and the camera axes expressed in
/// world coordinates (`right`, `down`, `forward`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraPose {
    pub model: CameraModel,
    pub center: Vec3,
    pub right: Vec3,
    pub down: Vec3,
    pub forward: Vec3,
}

impl CameraPose {
    pub fn new(model: CameraModel, center: Vec3, yaw: f64) -> Self {
        Self {
            model,
            center,
            forward: Vec3::new(yaw.cos(), yaw.sin(), 0.0),
            right: Vec3::new(yaw.sin(), -yaw.cos(), 0.0),
            down: Vec3::new(0.0, 0.0, -1.0),
        }
    }

    /// World point to camera coordinates `(X right, Y down, Z forward)`.
    pub fn to_camera(&self, p: Vec3) -> Vec3 {
        let d = p - self.center;
        Vec3::new(d.dot(self.right), d.dot(self.down), d.dot(self.forward))
    }

    /// Camera coordinates (Z > 0) to bottom-origin pixel `(u, v)`.
    pub fn project_camera(&self, c: Vec3) -> (f64, f64) {
        let m = &self.model;
        let u = m.fx * c.x / c.z + m.cx;
        let v_top = m.fy * c.y / c.z + m.cy;
        (u, m.height as f64 - v_top)
    }

    pub fn project(&self, p: Vec3) -> Option<(f64, f64)> {
        let c = self.to_camera(p);
        (c.z > 0.0).then(|| self.project_camera(c))
    }

    /// Unnormalized world direction through pixel `(u, v)` whose component
    /// along `forward` is exactly 1, so ray parameters are z-depths.
    pub fn pixel_direction(&self, u: f64, v: f64) -> Vec3 {
        let m = &self.model;
        let xc = (u - m.cx) / m.fx;
        let yc = (m.height as f64 - v - m.cy) / m.fy;
        self.right * xc + self.down * yc + self.forward
    }
}
