use serde::{Deserialize, Serialize};

use super::raycast::RaycastResult;
use super::Ray;
use crate::geom::Vec3;
use crate::worldsim::VoxelMap;

/// Horizontal pullback from the hit point, meters.
pub const DEFAULT_STANDOFF: f64 = 0.75;

/// Distance kept from the map faces when a pulled-back waypoint is clamped.
const INTERIOR_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaypointStatus {
    Hit,
    MapBoundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub position: Vec3,
    pub status: WaypointStatus,
    pub hit_voxel: Option<[usize; 3]>,
    pub standoff_applied: f64,
    /// The pullback left the map and the position was clamped back inside.
    pub clamped: bool,
}

pub fn emplace_waypoint(hit: &RaycastResult, ray: &Ray, map: &VoxelMap, standoff: f64) -> Waypoint {
    match *hit {
        RaycastResult::Boundary { point, .. } => Waypoint {
            position: point,
            status: WaypointStatus::MapBoundary,
            hit_voxel: None,
            standoff_applied: 0.0,
            clamped: false,
        },
        RaycastResult::Hit { voxel, point, .. } => {
            let h = Vec3::new(ray.direction.x, ray.direction.y, 0.0);
            let hn = h.norm();
            let (mut x, mut y, applied) = if hn > 1e-12 {
                let h = h * (1.0 / hn);
                (point.x - h.x * standoff, point.y - h.y * standoff, standoff)
            } else {
                (point.x, point.y, 0.0)
            };
            let e = map.extent();
            let cx = x.clamp(INTERIOR_MARGIN, e.x - INTERIOR_MARGIN);
            let cy = y.clamp(INTERIOR_MARGIN, e.y - INTERIOR_MARGIN);
            let clamped = cx != x || cy != y;
            (x, y) = (cx, cy);
            Waypoint {
                position: Vec3::new(x, y, map.support_at(x, y)),
                status: WaypointStatus::Hit,
                hit_voxel: Some(voxel),
                standoff_applied: applied,
                clamped,
            }
        }
    }
}
