//! Incremental voxel traversal (Amanatides and Woo).

use serde::{Deserialize, Serialize};

use super::{ProjectionError, Ray};
use crate::geom::Vec3;
use crate::worldsim::VoxelMap;

/// Origin offset applied to every axis when a ray passes through a voxel
/// edge or corner, making the traversal order unambiguous.
pub const CORNER_NUDGE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryReason {
    MapExit,
    MaxRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RaycastResult {
    Hit {
        voxel: [usize; 3],
        /// Where the ray enters the hit voxel.
        point: Vec3,
        t: f64,
    },
    Boundary {
        /// Where the ray leaves the map extent.
        point: Vec3,
        t: f64,
        reason: BoundaryReason,
    },
}

/// Parameter at which the ray leaves the map box; the origin must be inside.
fn exit_parameter(origin: Vec3, dir: Vec3, extent: Vec3) -> f64 {
    let mut t = f64::INFINITY;
    for i in 0..3 {
        let d = dir.axis(i);
        let o = origin.axis(i);
        if d > 0.0 {
            t = t.min((extent.axis(i) - o) / d);
        } else if d < 0.0 {
            t = t.min(-o / d);
        }
    }
    t.max(0.0)
}

struct Walk {
    visited_tie: bool,
    stop: Option<([usize; 3], f64)>,
}

/// Visits voxels in traversal order until `visit` returns true or the ray
/// leaves `[0, limit]`.
fn walk(
    origin: Vec3,
    dir: Vec3,
    map: &VoxelMap,
    limit: f64,
    mut visit: impl FnMut([usize; 3], f64) -> bool,
) -> Walk {
    let res = map.resolution();
    let dims = map.dims();
    let mut v = [0i64; 3];
    let mut step = [0i64; 3];
    let mut t_max = [f64::INFINITY; 3];
    let mut t_delta = [f64::INFINITY; 3];
    for i in 0..3 {
        let o = origin.axis(i);
        let d = dir.axis(i);
        v[i] = ((o / res).floor() as i64).clamp(0, dims[i] as i64 - 1);
        if d > 0.0 {
            step[i] = 1;
            t_max[i] = ((v[i] + 1) as f64 * res - o) / d;
            t_delta[i] = res / d;
        } else if d < 0.0 {
            step[i] = -1;
            t_max[i] = (v[i] as f64 * res - o) / d;
            t_delta[i] = -res / d;
        }
    }
    let mut t = 0.0;
    let mut tie = false;
    loop {
        let cur = [v[0] as usize, v[1] as usize, v[2] as usize];
        if visit(cur, t) {
            return Walk {
                visited_tie: tie,
                stop: Some((cur, t)),
            };
        }
        let axis = (0..3)
            .min_by(|&a, &b| t_max[a].total_cmp(&t_max[b]))
            .unwrap();
        let next = t_max[axis];
        if next > limit {
            break;
        }
        if (0..3).any(|b| b != axis && (t_max[b] - next).abs() <= 1e-12 * (1.0 + next.abs())) {
            tie = true;
        }
        v[axis] += step[axis];
        if v[axis] < 0 || v[axis] >= dims[axis] as i64 {
            break;
        }
        t = next;
        t_max[axis] += t_delta[axis];
    }
    Walk {
        visited_tie: tie,
        stop: None,
    }
}

fn check_origin(ray: &Ray, map: &VoxelMap) -> Result<(), ProjectionError> {
    if map.bounds().contains(ray.origin) {
        Ok(())
    } else {
        Err(ProjectionError::OriginOutsideMap(ray.origin))
    }
}

fn nudged(ray: &Ray, map: &VoxelMap) -> Vec3 {
    let e = map.extent();
    let o = ray.origin;
    Vec3::new(
        (o.x + CORNER_NUDGE).min(e.x),
        (o.y + CORNER_NUDGE).min(e.y),
        (o.z + CORNER_NUDGE).min(e.z),
    )
}

/// Whether the un-nudged traversal of `ray` passes through a voxel edge or
/// corner before stopping.
pub fn grazes_corner(ray: &Ray, map: &VoxelMap, max_range: f64) -> bool {
    let limit = exit_parameter(ray.origin, ray.direction, map.extent()).min(max_range);
    walk(ray.origin, ray.direction, map, limit, |v, _| map.get(v)).visited_tie
}

/// First occupied voxel along the ray within `max_range`, or the point where
/// the ray leaves the map.
pub fn raycast_first_hit(
    ray: &Ray,
    map: &VoxelMap,
    max_range: f64,
) -> Result<RaycastResult, ProjectionError> {
    check_origin(ray, map)?;
    let dir = ray.direction;
    let mut origin = ray.origin;
    let mut w = walk(origin, dir, map, exit_parameter(origin, dir, map.extent()).min(max_range), |v, _| map.get(v));
    if w.visited_tie {
        origin = nudged(ray, map);
        w = walk(origin, dir, map, exit_parameter(origin, dir, map.extent()).min(max_range), |v, _| map.get(v));
    }
    let t_exit = exit_parameter(origin, dir, map.extent());
    Ok(match w.stop {
        Some((voxel, t)) => RaycastResult::Hit {
            voxel,
            point: origin + dir * t,
            t,
        },
        None => RaycastResult::Boundary {
            point: origin + dir * t_exit,
            t: t_exit,
            reason: if max_range < t_exit {
                BoundaryReason::MaxRange
            } else {
                BoundaryReason::MapExit
            },
        },
    })
}

/// Every voxel the ray passes through, in order, up to the map exit or `max_range`.
pub fn traverse(ray: &Ray, map: &VoxelMap, max_range: f64) -> Result<Vec<[usize; 3]>, ProjectionError> {
    check_origin(ray, map)?;
    let limit = exit_parameter(ray.origin, ray.direction, map.extent()).min(max_range);
    let mut out = Vec::new();
    walk(ray.origin, ray.direction, map, limit, |v, _| {
        out.push(v);
        false
    });
    Ok(out)
}
