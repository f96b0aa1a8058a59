use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::robot::{Footprint, Pose, RobotState};
use super::SceneError;
use crate::geom::{Aabb, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Terrain {
    /// A one-voxel slab over the whole extent.
    Flat,
    /// Cell-wise terrain tops in meters, indexed `heights[iy][ix]`.
    Heightfield { cell: f64, heights: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub id: String,
    pub label: String,
    #[serde(default)]
    pub synonyms: Vec<String>,
    #[serde(default)]
    pub attributes: BTreeSet<String>,
    #[serde(rename = "box")]
    pub bbox: Aabb,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_of: Option<String>,
}

impl SceneObject {
    pub fn has_attribute(&self, property: &str) -> bool {
        let p = property.trim().to_lowercase();
        self.attributes.iter().any(|a| a.to_lowercase() == p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSpec {
    #[serde(default = "defaults::width")]
    pub width: f64,
    #[serde(default = "defaults::length")]
    pub length: f64,
    #[serde(default = "defaults::height")]
    pub height: f64,
    #[serde(default = "defaults::max_speed")]
    pub max_speed: f64,
    #[serde(default = "defaults::max_angular")]
    pub max_angular: f64,
}

impl Default for RobotSpec {
    fn default() -> Self {
        Self {
            width: defaults::width(),
            length: defaults::length(),
            height: defaults::height(),
            max_speed: defaults::max_speed(),
            max_angular: defaults::max_angular(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraSpec {
    #[serde(default = "defaults::mount_height")]
    pub mount_height: f64,
    #[serde(default)]
    pub calibration_noise_deg: f64,
}

impl Default for CameraSpec {
    fn default() -> Self {
        Self {
            mount_height: defaults::mount_height(),
            calibration_noise_deg: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaFixture {
    pub object_id: String,
    pub question: String,
    pub answer: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Confusion {
    pub from: String,
    pub to: String,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectorNoise {
    #[serde(default)]
    pub miss_prob: f64,
    #[serde(default)]
    pub confusion: Vec<Confusion>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub name: String,
    pub map_extent: Vec3,
    pub voxel_resolution: f64,
    pub terrain: Terrain,
    #[serde(default)]
    pub objects: Vec<SceneObject>,
    pub robot_start: Pose,
    #[serde(default)]
    pub robot: RobotSpec,
    #[serde(default)]
    pub cameras: CameraSpec,
    #[serde(default)]
    pub qa_fixtures: Vec<QaFixture>,
    #[serde(default)]
    pub detector_noise: DetectorNoise,
}

mod defaults {
    pub fn width() -> f64 {
        0.5
    }
    pub fn length() -> f64 {
        1.1
    }
    pub fn height() -> f64 {
        0.7
    }
    pub fn max_speed() -> f64 {
        1.0
    }
    pub fn max_angular() -> f64 {
        2.0
    }
    pub fn mount_height() -> f64 {
        0.5
    }
}

impl SceneSpec {
    pub fn object(&self, id: &str) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn start_state(&self) -> RobotState {
        RobotState {
            pose: self.robot_start,
            footprint: Footprint {
                width: self.robot.width,
                length: self.robot.length,
                height: self.robot.height,
            },
            max_speed: self.robot.max_speed,
            max_angular: self.robot.max_angular,
        }
    }

    /// Solid boxes making up the terrain.
    pub fn terrain_boxes(&self) -> Vec<Aabb> {
        let e = self.map_extent;
        match &self.terrain {
            Terrain::Flat => vec![Aabb::new(
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(e.x, e.y, self.voxel_resolution),
            )],
            Terrain::Heightfield { cell, heights } => {
                let mut out = Vec::new();
                for (iy, row) in heights.iter().enumerate() {
                    for (ix, &h) in row.iter().enumerate() {
                        let min = Vec3::new(ix as f64 * cell, iy as f64 * cell, 0.0);
                        let max = Vec3::new(
                            ((ix + 1) as f64 * cell).min(e.x),
                            ((iy + 1) as f64 * cell).min(e.y),
                            h,
                        );
                        if max.x > min.x && max.y > min.y && h > 0.0 {
                            out.push(Aabb::new(min, max));
                        }
                    }
                }
                out
            }
        }
    }

    /// Checks every scene invariant; the first violation is reported.
    pub fn validate(&self) -> Result<(), SceneError> {
        let inv = |message: String| Err(SceneError::Invariant { message });
        let e = self.map_extent;
        if !(e.x > 0.0 && e.y > 0.0 && e.z > 0.0) {
            return inv("map_extent must be positive".into());
        }
        let res = self.voxel_resolution;
        if res <= 0.0 {
            return inv("voxel_resolution must be positive".into());
        }
        for (axis, v) in [("x", e.x), ("y", e.y), ("z", e.z)] {
            let q = v / res;
            if (q - q.round()).abs() > 1e-6 {
                return inv(format!(
                    "map_extent.{axis} is not a multiple of voxel_resolution"
                ));
            }
        }
        if let Terrain::Heightfield { cell, heights } = &self.terrain {
            if *cell <= 0.0 {
                return inv("terrain.cell must be positive".into());
            }
            if heights.iter().flatten().any(|h| !(*h > 0.0 && *h < e.z)) {
                return inv("terrain heights must lie inside (0, extent.z)".into());
            }
        }
        let r = &self.robot;
        if !(r.width > 0.0 && r.length > 0.0 && r.height > 0.0 && r.max_speed > 0.0) {
            return inv("robot footprint and speed must be positive".into());
        }
        let whole = Aabb::new(Vec3::default(), e);
        let mut seen = BTreeSet::new();
        for o in &self.objects {
            if !seen.insert(o.id.as_str()) {
                return inv(format!("duplicate object id: {}", o.id));
            }
            if !o.bbox.is_valid() {
                return inv(format!("object {} has an empty box", o.id));
            }
            if !(whole.contains(o.bbox.min) && whole.contains(o.bbox.max)) {
                return inv(format!("object {} lies outside the map extent", o.id));
            }
        }
        for o in &self.objects {
            if let Some(s) = &o.support_of {
                let Some(base) = self.object(s) else {
                    return inv(format!("object {} is supported by unknown object {s}", o.id));
                };
                let gap = (o.bbox.min.z - base.bbox.max.z).abs();
                let overlaps = o.bbox.min.x < base.bbox.max.x
                    && base.bbox.min.x < o.bbox.max.x
                    && o.bbox.min.y < base.bbox.max.y
                    && base.bbox.min.y < o.bbox.max.y;
                if gap > res + 1e-9 || !overlaps {
                    return inv(format!("object {} is not in contact with {s}", o.id));
                }
            }
        }
        for q in &self.qa_fixtures {
            if q.object_id != "llm" && self.object(&q.object_id).is_none() {
                return inv(format!("qa fixture names unknown object {}", q.object_id));
            }
        }
        let n = &self.detector_noise;
        if !(0.0..=1.0).contains(&n.miss_prob) || n.confusion.iter().any(|c| !(0.0..=1.0).contains(&c.prob)) {
            return inv("detector noise probabilities must lie in [0, 1]".into());
        }
        let p = self.robot_start;
        if !(p.x > 0.0 && p.x < e.x && p.y > 0.0 && p.y < e.y) {
            return inv("robot_start lies outside the map extent".into());
        }
        if let Some(o) = self
            .objects
            .iter()
            .find(|o| o.bbox.footprint_distance(p.x, p.y) < r.width / 2.0)
        {
            return inv(format!("robot_start is not traversable: blocked by {}", o.id));
        }
        Ok(())
    }
}

pub fn parse_scene(text: &str) -> Result<SceneSpec, SceneError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let scene: SceneSpec = serde_path_to_error::deserialize(de).map_err(|e| SceneError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    scene.validate()?;
    Ok(scene)
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<SceneSpec, SceneError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SceneError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scene(&text)
}
