//! Image-to-map geometry: panorama layout, pixel rays, voxel ray casting and
//! waypoint emplacement.

pub mod layout;
pub mod raycast;
pub mod waypoint;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use layout::{assemble_representation, Mode, PanoramaLayout, PanoramaRect, Representation};
pub use raycast::{raycast_first_hit, traverse, BoundaryReason, RaycastResult};
pub use waypoint::{emplace_waypoint, Waypoint, WaypointStatus, DEFAULT_STANDOFF};

use crate::geom::Vec3;
use crate::worldsim::render::camera_poses;
use crate::worldsim::{Frame, RobotState, World};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    #[error("unmapped panorama column {0}")]
    UnmappedColumn(f64),
    #[error("pixel ({u}, {v}) outside the {frame} view")]
    PixelOutsideView { u: f64, v: f64, frame: String },
    #[error("unknown view {0:?}")]
    UnknownView(String),
    #[error("ray origin {0:?} outside the map")]
    OriginOutsideMap(Vec3),
    #[error("degenerate ray direction")]
    DegenerateDirection,
}

/// Half-line with a unit direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub origin: Vec3,
    pub direction: Vec3,
}

impl Ray {
    /// Normalizes `direction`; `None` for a zero or non-finite vector.
    pub fn new(origin: Vec3, direction: Vec3) -> Option<Ray> {
        let n = direction.norm();
        (n.is_finite() && n > 0.0).then(|| Ray {
            origin,
            direction: direction * (1.0 / n),
        })
    }

    pub fn towards(origin: Vec3, target: Vec3) -> Option<Ray> {
        Ray::new(origin, target - origin)
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

/// A root view name: one camera frame or the stitched panorama.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewName {
    Panorama,
    #[serde(untagged)]
    Frame(Frame),
}

impl ViewName {
    pub fn parse(s: &str) -> Option<ViewName> {
        if s == "panorama" {
            Some(ViewName::Panorama)
        } else {
            Frame::parse(s).map(ViewName::Frame)
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ViewName::Panorama => "panorama",
            ViewName::Frame(f) => f.name(),
        }
    }
}

/// Rotates `d` about the world z axis by `angle` radians.
pub fn yaw_rotate(d: Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    Vec3::new(c * d.x - s * d.y, s * d.x + c * d.y, d.z)
}

/// World ray through bottom-origin pixel `(u, v)` of a view at the robot's
/// pose. The rig's calibration bias rotates the ray about z.
pub fn pixel_to_ray(
    u: f64,
    v: f64,
    view: ViewName,
    world: &World,
    robot: &RobotState,
) -> Result<Ray, ProjectionError> {
    let (frame, local_u) = match view {
        ViewName::Panorama => PanoramaLayout::STANDARD
            .decompose(u)
            .ok_or(ProjectionError::UnmappedColumn(u))?,
        ViewName::Frame(f) => (f, u),
    };
    let cam = camera_poses(world, &robot.pose)[frame.index()];
    let (w, h) = (cam.model.width as f64, cam.model.height as f64);
    if !(0.0..=w).contains(&local_u) || !(0.0..=h).contains(&v) {
        return Err(ProjectionError::PixelOutsideView {
            u,
            v,
            frame: view.name().to_string(),
        });
    }
    let dir = yaw_rotate(
        cam.pixel_direction(local_u, v),
        world.rig.calibration_noise_deg.to_radians(),
    );
    Ray::new(cam.center, dir).ok_or(ProjectionError::DegenerateDirection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldsim::scene::SceneSpec;

    fn world() -> World {
        let s: SceneSpec = crate::worldsim::parse_scene(
            r#"{"name":"t","map_extent":[10,10,3],"voxel_resolution":0.1,"terrain":{"type":"flat"},
                "objects":[],"robot_start":{"x":5,"y":5,"yaw":0}}"#,
        )
        .unwrap();
        World::new(s)
    }

    #[test]
    fn principal_axis_and_edge() {
        let w = world();
        let r = w.scene.start_state();
        let ray = pixel_to_ray(320.0, 240.0, ViewName::Frame(Frame::Front), &w, &r).unwrap();
        assert!((ray.direction - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-12);
        let ray = pixel_to_ray(640.0, 240.0, ViewName::Frame(Frame::Front), &w, &r).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((ray.direction - Vec3::new(h, -h, 0.0)).norm() < 1e-12);
        assert!((ray.direction.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn panorama_pad_is_unmapped() {
        let w = world();
        let r = w.scene.start_state();
        assert_eq!(
            pixel_to_ray(650.0, 240.0, ViewName::Panorama, &w, &r),
            Err(ProjectionError::UnmappedColumn(650.0))
        );
        let a = pixel_to_ray(1000.0, 100.0, ViewName::Panorama, &w, &r).unwrap();
        let b = pixel_to_ray(340.0, 100.0, ViewName::Frame(Frame::Front), &w, &r).unwrap();
        assert_eq!(a, b);
    }
}
