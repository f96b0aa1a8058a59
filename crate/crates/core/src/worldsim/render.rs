use serde::{Deserialize, Serialize};

use super::camera::{CameraPose, Frame};
use super::robot::{Pose, RobotState};
use super::World;
use crate::geom::{Aabb, Rect, Vec3};

/// Points closer than this to the image plane are clipped away.
pub const NEAR_PLANE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedRect {
    pub object_id: String,
    #[serde(rename = "box")]
    pub rect: Rect,
    /// Camera z-depth of the nearest clipped box vertex.
    pub depth: f64,
}

/// Per-pixel camera z-depth; stored top row first (`row = height - 1 - v`).
#[derive(Debug, Clone, PartialEq)]
pub struct DepthRaster {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl DepthRaster {
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    /// Depth at column `i`, bottom-origin row `j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(self.height - 1 - j) * self.width + i]
    }

    fn min_in(&mut self, i: usize, j: usize, d: f64) {
        let k = (self.height - 1 - j) * self.width + i;
        if d < self.data[k] {
            self.data[k] = d;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameView {
    pub frame: Frame,
    pub camera: CameraPose,
    pub rects: Vec<ProjectedRect>,
    #[serde(skip)]
    pub depth: Option<DepthRaster>,
}

impl FrameView {
    pub fn width(&self) -> f64 {
        self.camera.model.width as f64
    }

    pub fn height(&self) -> f64 {
        self.camera.model.height as f64
    }

    pub fn image_rect(&self) -> Rect {
        Rect::new(0.0, 0.0, self.width(), self.height())
    }

    pub fn rect_of(&self, object_id: &str) -> Option<&ProjectedRect> {
        self.rects.iter().find(|r| r.object_id == object_id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewSet {
    pub pose: Pose,
    pub max_range: f64,
    pub frames: Vec<FrameView>,
}

impl ViewSet {
    pub fn frame(&self, f: Frame) -> &FrameView {
        &self.frames[f.index()]
    }
}

/// Image rectangle of a box: corners in front of the near plane plus the
/// near-plane crossings of its edges, projected and clipped to the image.
pub fn project_box(cam: &CameraPose, b: &Aabb) -> Option<(Rect, f64)> {
    let corners = b.corners().map(|c| cam.to_camera(c));
    let mut pts: Vec<Vec3> = corners.iter().copied().filter(|c| c.z >= NEAR_PLANE).collect();
    for (a, e) in Aabb::EDGES {
        let (p, q) = (corners[a], corners[e]);
        if (p.z < NEAR_PLANE) != (q.z < NEAR_PLANE) {
            let t = (NEAR_PLANE - p.z) / (q.z - p.z);
            pts.push(p + (q - p) * t);
        }
    }
    if pts.is_empty() {
        return None;
    }
    let mut r = Rect::new(f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut depth = f64::INFINITY;
    for c in &pts {
        let (u, v) = cam.project_camera(*c);
        r.left = r.left.min(u);
        r.right = r.right.max(u);
        r.lower = r.lower.min(v);
        r.upper = r.upper.max(v);
        depth = depth.min(c.z);
    }
    let m = &cam.model;
    let clipped = r.intersect(&Rect::new(0.0, 0.0, m.width as f64, m.height as f64));
    (clipped.area() > 0.0).then_some((clipped, depth))
}

/// Camera poses for a robot pose; optical centers sit `mount_height` above
/// the terrain support under the robot.
pub fn camera_poses(world: &World, pose: &Pose) -> [CameraPose; 3] {
    let z = world.map.support_at(pose.x, pose.y) + world.rig.mount_height;
    let center = Vec3::new(pose.x, pose.y, z);
    world
        .rig
        .cameras
        .map(|m| CameraPose::new(m, center, pose.yaw + m.yaw_offset))
}

fn splat(raster: &mut DepthRaster, cam: &CameraPose, solid: &Aabb, max_range: f64) {
    let Some((r, _)) = project_box(cam, solid) else {
        return;
    };
    let i0 = (r.left - 0.5).ceil().max(0.0) as usize;
    let i1 = ((r.right - 0.5).floor() as i64).min(raster.width as i64 - 1);
    let j0 = (r.lower - 0.5).ceil().max(0.0) as usize;
    let j1 = ((r.upper - 0.5).floor() as i64).min(raster.height as i64 - 1);
    if i1 < 0 || j1 < 0 {
        return;
    }
    for j in j0..=j1 as usize {
        for i in i0..=i1 as usize {
            let dir = cam.pixel_direction(i as f64 + 0.5, j as f64 + 0.5);
            if let Some(t) = solid.ray_entry(cam.center, dir) {
                raster.min_in(i, j, t.min(max_range));
            }
        }
    }
}

pub fn render_depth(world: &World, cam: &CameraPose) -> DepthRaster {
    let m = &cam.model;
    let max_range = world.rig.max_range;
    let mut raster = DepthRaster::filled(m.width as usize, m.height as usize, max_range);
    for solid in world.solids() {
        splat(&mut raster, cam, &solid, max_range);
    }
    raster
}

/// Projects every object into the three frames and renders depth rasters.
pub fn render_views(world: &World, robot: &RobotState) -> ViewSet {
    render_views_with(world, robot, true)
}

/// As [`render_views`]; `with_depth = false` skips the rasters.
pub fn render_views_with(world: &World, robot: &RobotState, with_depth: bool) -> ViewSet {
    let frames = camera_poses(world, &robot.pose)
        .into_iter()
        .map(|cam| {
            let rects = world
                .scene
                .objects
                .iter()
                .filter_map(|o| {
                    project_box(&cam, &o.bbox).map(|(rect, depth)| ProjectedRect {
                        object_id: o.id.clone(),
                        rect,
                        depth,
                    })
                })
                .collect();
            FrameView {
                frame: cam.model.frame,
                camera: cam,
                rects,
                depth: with_depth.then(|| render_depth(world, &cam)),
            }
        })
        .collect();
    ViewSet {
        pose: robot.pose,
        max_range: world.rig.max_range,
        frames,
    }
}
