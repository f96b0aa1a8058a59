use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::camera::Frame;
use super::render::{FrameView, ViewSet};
use super::scene::{DetectorNoise, SceneObject};
use super::{World, WorldError};
use crate::geom::{union_area, Rect};
use crate::projection::raycast::{raycast_first_hit, RaycastResult};
use crate::projection::Ray;

/// Smallest in-region projected area a detection may have, px².
pub const MIN_DETECTION_AREA: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub frame: Frame,
    pub rect: Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub object_id: String,
    pub frame: Frame,
    /// Projected box clamped to the query region.
    #[serde(rename = "box")]
    pub rect: Rect,
    pub score: f64,
}

const STOPWORDS: &[&str] = &["the", "a", "an", "of"];

pub fn tokens(s: &str) -> Vec<String> {
    s.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty() && !STOPWORDS.contains(t))
        .map(String::from)
        .collect()
}

/// Equality up to a trailing plural `s` or `es`.
pub fn token_eq(a: &str, b: &str) -> bool {
    let plural = |x: &str, y: &str| x.strip_prefix(y).is_some_and(|rest| rest == "s" || rest == "es");
    a == b || plural(a, b) || plural(b, a)
}

/// A name matches a query when every name token appears in the query and
/// every leftover query token is one of the object's attributes.
fn name_matches(name: &str, query: &[String], attributes: &BTreeSet<String>) -> bool {
    let name_toks = tokens(name);
    if name_toks.is_empty() {
        return false;
    }
    let mut used = vec![false; query.len()];
    for n in &name_toks {
        match query
            .iter()
            .enumerate()
            .position(|(i, q)| !used[i] && token_eq(q, n))
        {
            Some(i) => used[i] = true,
            None => return false,
        }
    }
    let attr_toks: Vec<String> = attributes.iter().flat_map(|a| tokens(a)).collect();
    query
        .iter()
        .zip(&used)
        .filter(|(_, u)| !**u)
        .all(|(q, _)| attr_toks.iter().any(|a| token_eq(a, q)))
}

pub fn object_matches(o: &SceneObject, query: &str) -> bool {
    let q = tokens(query);
    if q.is_empty() {
        return false;
    }
    std::iter::once(&o.label)
        .chain(&o.synonyms)
        .any(|n| name_matches(n, &q, &o.attributes))
}

fn fnv1a(parts: &[&[u8]]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for p in parts {
        for b in *p {
            h ^= *b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Independent stream per (seed, object, query) so results do not depend on
/// evaluation order.
fn noise_rng(seed: u64, object_id: &str, query: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(fnv1a(&[&seed.to_le_bytes(), object_id.as_bytes(), query.as_bytes()]))
}

/// True when the first voxel hit along the ray to the box center belongs to
/// the object.
pub fn center_ray_unoccluded(world: &World, view: &FrameView, o: &SceneObject) -> bool {
    let origin = view.camera.center;
    let target = o.bbox.center();
    let Some(ray) = Ray::towards(origin, target) else {
        return true;
    };
    match raycast_first_hit(&ray, &world.map, f64::INFINITY) {
        Ok(RaycastResult::Hit { voxel, .. }) => world.map.box_contains_voxel(&o.bbox, voxel),
        _ => false,
    }
}

/// Fraction of the object's projected rectangle not covered by nearer rectangles.
pub fn visible_fraction(view: &FrameView, object_id: &str) -> f64 {
    let Some(me) = view.rect_of(object_id) else {
        return 0.0;
    };
    let area = me.rect.area();
    if area <= 0.0 {
        return 0.0;
    }
    let covers: Vec<Rect> = view
        .rects
        .iter()
        .filter(|r| r.object_id != object_id && r.depth < me.depth)
        .map(|r| r.rect.intersect(&me.rect))
        .collect();
    (1.0 - union_area(&covers) / area).clamp(0.0, 1.0)
}

fn candidate(world: &World, view: &FrameView, o: &SceneObject, region: &Region) -> Option<Detection> {
    let pr = view.rect_of(&o.id)?;
    let clipped = pr.rect.intersect(&region.rect);
    if clipped.area() < MIN_DETECTION_AREA || !center_ray_unoccluded(world, view, o) {
        return None;
    }
    Some(Detection {
        object_id: o.id.clone(),
        frame: region.frame,
        rect: clipped,
        score: visible_fraction(view, &o.id),
    })
}

fn sort_detections(d: &mut [Detection]) {
    d.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.rect.center().0.total_cmp(&b.rect.center().0))
            .then(a.object_id.cmp(&b.object_id))
    });
}

/// Synthetic open-vocabulary detector over one frame region.
pub fn synthetic_detect(
    world: &World,
    views: &ViewSet,
    query: &str,
    region: &Region,
    noise: &DetectorNoise,
) -> Vec<Detection> {
    let view = views.frame(region.frame);
    let q = query.trim().to_lowercase();
    let mut out = Vec::new();
    for o in &world.scene.objects {
        let mut rng = noise_rng(noise.seed, &o.id, &q);
        let mut hit = object_matches(o, &q);
        if !hit {
            let qt = tokens(&q);
            for c in &noise.confusion {
                let to_matches = name_matches(&c.to, &qt, &BTreeSet::new());
                let from_matches = tokens(&c.from) == tokens(&o.label);
                if to_matches && from_matches && rng.random::<f64>() < c.prob {
                    hit = true;
                    break;
                }
            }
        }
        if !hit {
            continue;
        }
        if noise.miss_prob > 0.0 && rng.random::<f64>() < noise.miss_prob {
            continue;
        }
        if let Some(d) = candidate(world, view, o, region) {
            out.push(d);
        }
    }
    sort_detections(&mut out);
    out
}

/// Every object the noiseless detector would report in the region, whatever
/// its label.
pub fn visible_objects(world: &World, views: &ViewSet, region: &Region) -> Vec<Detection> {
    let view = views.frame(region.frame);
    let mut out: Vec<Detection> = world
        .scene
        .objects
        .iter()
        .filter_map(|o| candidate(world, view, o, region))
        .collect();
    sort_detections(&mut out);
    out
}

pub fn attribute_oracle(world: &World, object_id: &str, property: &str) -> Result<bool, WorldError> {
    world
        .scene
        .object(object_id)
        .map(|o| o.has_attribute(property))
        .ok_or_else(|| WorldError::UnknownObject(object_id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(label: &str, syn: &[&str], attrs: &[&str]) -> SceneObject {
        SceneObject {
            id: "o".into(),
            label: label.into(),
            synonyms: syn.iter().map(|s| s.to_string()).collect(),
            attributes: attrs.iter().map(|s| s.to_string()).collect(),
            bbox: crate::geom::Aabb::new(Default::default(), crate::geom::Vec3::new(1.0, 1.0, 1.0)),
            support_of: None,
        }
    }

    #[test]
    fn query_matching() {
        let bp = obj("backpack", &["bag"], &["red"]);
        assert!(object_matches(&bp, "backpack"));
        assert!(object_matches(&bp, "red backpack"));
        assert!(object_matches(&bp, "Red Bag"));
        assert!(object_matches(&bp, "backpacks"));
        assert!(!object_matches(&bp, "black backpack"));
        assert!(!object_matches(&bp, "chair"));
        let cone = obj("cone", &["conical traffic delineator"], &["orange"]);
        assert!(object_matches(&cone, "conical traffic delineator"));
        let fe = obj("fire extinguisher", &[], &["red"]);
        assert!(object_matches(&fe, "fire extinguisher"));
        assert!(!object_matches(&fe, "fire hydrant"));
    }
}
