use serde::{Deserialize, Serialize};

use crate::geom::Rect;
use crate::worldsim::{Frame, FrameView, ViewSet};

/// Side-by-side placement of the three frames with blank pad columns between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanoramaLayout {
    pub frame_width: f64,
    pub frame_height: f64,
    pub pad: f64,
}

impl PanoramaLayout {
    pub const STANDARD: PanoramaLayout = PanoramaLayout {
        frame_width: 640.0,
        frame_height: 480.0,
        pad: 20.0,
    };

    pub fn width(&self) -> f64 {
        3.0 * self.frame_width + 2.0 * self.pad
    }

    pub fn offset(&self, f: Frame) -> f64 {
        f.index() as f64 * (self.frame_width + self.pad)
    }

    /// Panorama column to `(frame, local u)`; `None` inside pad columns or
    /// outside the panorama.
    pub fn decompose(&self, x: f64) -> Option<(Frame, f64)> {
        Frame::ALL.into_iter().find_map(|f| {
            let off = self.offset(f);
            (x >= off && x < off + self.frame_width).then_some((f, x - off))
        })
    }

    /// Column range `[lo, hi)` of a frame.
    pub fn span(&self, f: Frame) -> (f64, f64) {
        let off = self.offset(f);
        (off, off + self.frame_width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// One stitched panorama.
    A,
    /// Three separately named frames.
    B,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Some(Mode::A),
            "B" => Some(Mode::B),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanoramaRect {
    pub object_id: String,
    pub frame: Frame,
    #[serde(rename = "box")]
    pub rect: Rect,
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode")]
pub enum Representation {
    A {
        width: f64,
        height: f64,
        rects: Vec<PanoramaRect>,
    },
    B {
        frames: Vec<FrameView>,
    },
}

pub fn assemble_representation(views: &ViewSet, mode: Mode) -> Representation {
    match mode {
        Mode::A => {
            let layout = PanoramaLayout::STANDARD;
            let rects = views
                .frames
                .iter()
                .flat_map(|fv| {
                    let off = layout.offset(fv.frame);
                    fv.rects.iter().map(move |r| PanoramaRect {
                        object_id: r.object_id.clone(),
                        frame: fv.frame,
                        rect: r.rect.translate_x(off),
                        depth: r.depth,
                    })
                })
                .collect();
            Representation::A {
                width: layout.width(),
                height: layout.frame_height,
                rects,
            }
        }
        Mode::B => Representation::B {
            frames: views.frames.clone(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_offsets() {
        let l = PanoramaLayout::STANDARD;
        assert_eq!(l.width(), 1960.0);
        assert_eq!(l.span(Frame::Front), (660.0, 1300.0));
        assert_eq!(l.span(Frame::Right), (1320.0, 1960.0));
        assert_eq!(l.decompose(650.0), None);
        assert_eq!(l.decompose(1000.0), Some((Frame::Front, 340.0)));
        assert_eq!(l.decompose(1960.0), None);
        for x in 0..1960 {
            let x = x as f64;
            if let Some((f, u)) = l.decompose(x) {
                assert_eq!(u + l.offset(f), x);
            }
        }
    }
}
