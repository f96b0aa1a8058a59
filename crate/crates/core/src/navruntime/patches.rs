//! World-facing semantics of the patch API.

use std::collections::BTreeSet;

use super::{ExecutionTrace, PatchRecord, RuntimeError};
use crate::geom::Rect;
use crate::projection::{Mode, PanoramaLayout, ViewName};
use crate::worldsim::detect::{object_matches, synthetic_detect, token_eq, tokens, visible_objects, Region};
use crate::worldsim::{Frame, ViewSet, World};

/// A detection expressed in the coordinates of the patch it was found in.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Found {
    pub object_id: String,
    pub frame: Frame,
    pub rect: Rect,
    pub score: f64,
    pub view: ViewName,
}

pub(crate) struct Scope<'a> {
    pub world: &'a World,
    pub views: &'a ViewSet,
    pub mode: Mode,
}

/// Per-frame pieces of a patch: `(frame, region in frame pixels, x offset
/// back to patch coordinates)`.
fn components(p: &PatchRecord, views: &ViewSet) -> Vec<(Frame, Rect, f64)> {
    let full = |f: Frame| views.frame(f).image_rect();
    match p.frame {
        Some(ViewName::Frame(f)) => vec![(f, p.bounds.intersect(&full(f)), 0.0)],
        Some(ViewName::Panorama) => {
            let layout = PanoramaLayout::STANDARD;
            Frame::ALL
                .into_iter()
                .map(|f| {
                    let off = layout.offset(f);
                    (f, p.bounds.translate_x(-off).intersect(&full(f)), off)
                })
                .collect()
        }
        None => Frame::ALL
            .into_iter()
            .map(|f| (f, p.bounds.intersect(&full(f)), 0.0))
            .collect(),
    }
}

fn sort_found(v: &mut [Found]) {
    v.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.rect.center().0.total_cmp(&b.rect.center().0))
            .then(a.object_id.cmp(&b.object_id))
    });
}

impl Scope<'_> {
    /// Detections inside a patch. Frame-specific and panorama patches give one
    /// list ordered by score then horizontal center; the merged mode-B root
    /// concatenates the per-frame lists left, front, right in frame-local
    /// coordinates.
    pub fn detect(&self, p: &PatchRecord, query: Option<&str>) -> Vec<Found> {
        if p.bounds.area() <= 0.0 {
            return Vec::new();
        }
        let noise = &self.world.scene.detector_noise;
        let mut out = Vec::new();
        for (f, region, off) in components(p, self.views) {
            if region.area() <= 0.0 {
                continue;
            }
            let region = Region { frame: f, rect: region };
            let dets = match query {
                Some(q) => synthetic_detect(self.world, self.views, q, &region, noise),
                None => visible_objects(self.world, self.views, &region),
            };
            out.extend(dets.into_iter().map(|d| Found {
                object_id: d.object_id,
                frame: f,
                rect: d.rect.translate_x(off),
                score: d.score,
                view: match p.frame {
                    Some(ViewName::Panorama) => ViewName::Panorama,
                    _ => ViewName::Frame(f),
                },
            }));
        }
        if p.frame.is_some() {
            sort_found(&mut out);
        }
        out
    }

    /// Object a patch is about: its `find` source when that matches the
    /// filter, otherwise the visible object with the largest intersection,
    /// ties by score.
    pub fn dominant(&self, p: &PatchRecord, name: Option<&str>) -> Option<String> {
        let matches = |id: &str| {
            name.is_none_or(|n| {
                self.world
                    .scene
                    .object(id)
                    .is_some_and(|o| object_matches(o, n))
            })
        };
        if let Some(id) = &p.source_object {
            if matches(id) {
                return Some(id.clone());
            }
        }
        let mut best: Option<Found> = None;
        for d in self.detect(p, None) {
            if !matches(&d.object_id) {
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => {
                    let (a1, a0) = (d.rect.area(), b.rect.area());
                    a1 > a0 || (a1 == a0 && d.score > b.score)
                }
            };
            if better {
                best = Some(d);
            }
        }
        best.map(|d| d.object_id)
    }

    /// Label and attribute tokens of an object.
    pub fn descriptor_tokens(&self, id: &str) -> Vec<String> {
        let Some(o) = self.world.scene.object(id) else {
            return Vec::new();
        };
        let mut t = tokens(&o.label);
        for a in &o.attributes {
            t.extend(tokens(a));
        }
        t
    }

    /// Median ground-truth depth over pixel centers inside the patch; max
    /// range when the patch covers no pixel.
    pub fn median_depth(&self, p: &PatchRecord) -> f64 {
        let mut samples = Vec::new();
        for (f, r, _) in components(p, self.views) {
            if r.width() <= 0.0 || r.height() <= 0.0 {
                continue;
            }
            let Some(raster) = &self.views.frame(f).depth else {
                continue;
            };
            let i0 = (r.left - 0.5).ceil().max(0.0) as usize;
            let i1 = ((r.right - 0.5).floor() as i64).min(raster.width as i64 - 1);
            let j0 = (r.lower - 0.5).ceil().max(0.0) as usize;
            let j1 = ((r.upper - 0.5).floor() as i64).min(raster.height as i64 - 1);
            if i1 < i0 as i64 || j1 < j0 as i64 {
                continue;
            }
            for j in j0..=j1 as usize {
                for i in i0..=i1 as usize {
                    samples.push(raster.get(i, j));
                }
            }
        }
        median(&mut samples).unwrap_or(self.views.max_range)
    }

    pub fn qa_answer(&self, object_id: &str, question: &str) -> Option<String> {
        let q = normalize_question(question);
        self.world
            .scene
            .qa_fixtures
            .iter()
            .find(|f| f.object_id == object_id && normalize_question(&f.question) == q)
            .map(|f| f.answer.clone())
    }
}

/// Median with the two middle values averaged for even counts.
pub fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

/// Lowercase, punctuation stripped, whitespace collapsed.
pub fn normalize_question(q: &str) -> String {
    q.to_lowercase()
        .chars()
        .map(|c| if c.is_alphanumeric() || c.is_whitespace() { c } else { ' ' })
        .collect::<String>()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Number of distinct tokens of `text` that appear among `descriptor`.
pub fn token_overlap(text: &str, descriptor: &[String]) -> usize {
    let t: BTreeSet<String> = tokens(text).into_iter().collect();
    t.iter()
        .filter(|w| descriptor.iter().any(|d| token_eq(d, w)))
        .count()
}

/// `-IoU` for overlapping boxes, otherwise the Euclidean gap between edges.
pub fn patch_distance(a: &Rect, b: &Rect) -> f64 {
    if a.intersection_area(b) > 0.0 {
        return -a.iou(b);
    }
    let gx = 0f64.max(a.left - b.right).max(b.left - a.right);
    let gy = 0f64.max(a.lower - b.upper).max(b.lower - a.upper);
    gx.hypot(gy)
}

/// Strips everything but digits, `.` and `-`; a `digits-digits` range
/// yields its first value.
pub fn coerce_to_numeric(s: &str) -> Result<f64, RuntimeError> {
    let kept: String = s
        .chars()
        .filter(|c| c.is_ascii_digit() || *c == '.' || *c == '-')
        .collect();
    let bytes = kept.as_bytes();
    let token = match (1..bytes.len()).find(|&i| {
        bytes[i] == b'-' && bytes[i - 1].is_ascii_digit() && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)
    }) {
        Some(i) => &kept[..i],
        None => &kept[..],
    };
    token
        .parse::<f64>()
        .map_err(|_| RuntimeError::Value(format!("no numeric value in {s:?}")))
}

pub(crate) fn note(trace: &mut ExecutionTrace, msg: impl Into<String>) {
    trace.notes.push(msg.into());
}
