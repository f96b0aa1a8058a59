//! Deterministic simulated world: scene description, voxel occupancy, the
//! three-camera rig, a synthetic detector and unicycle kinematics.

pub mod camera;
pub mod detect;
pub mod render;
pub mod robot;
pub mod scene;
pub mod voxel;

use thiserror::Error;

pub use camera::{CameraModel, CameraPose, CameraRig, Frame};
pub use detect::{attribute_oracle, synthetic_detect, Detection, Region};
pub use render::{render_views, render_views_with, DepthRaster, FrameView, ProjectedRect, ViewSet};
pub use robot::{step_robot, wrap_angle, Footprint, Pose, RobotState, VelocityCommand};
pub use scene::{load_scene, parse_scene, SceneObject, SceneSpec, Terrain};
pub use voxel::{build_voxel_map, Provenance, VoxelMap};

use crate::geom::Aabb;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("cannot read scene {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("scene schema violation at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("scene invariant violated: {message}")]
    Invariant { message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("unknown object id: {0}")]
    UnknownObject(String),
}

/// A loaded scene together with its derived voxel map and camera rig.
#[derive(Debug, Clone)]
pub struct World {
    pub scene: SceneSpec,
    pub map: VoxelMap,
    pub rig: CameraRig,
}

impl World {
    pub fn new(scene: SceneSpec) -> Self {
        let map = build_voxel_map(&scene);
        let rig = CameraRig::standard(
            scene.cameras.mount_height,
            scene.cameras.calibration_noise_deg,
        );
        Self { scene, map, rig }
    }

    /// Terrain and object boxes; everything the depth renderer can see.
    pub fn solids(&self) -> Vec<Aabb> {
        let mut out = self.scene.terrain_boxes();
        out.extend(self.scene.objects.iter().map(|o| o.bbox));
        out
    }
}
