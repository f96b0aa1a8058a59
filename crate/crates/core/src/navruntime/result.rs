use serde::{Deserialize, Serialize};

use super::interp::frame_rank;
use super::value::Value;
use super::ExecutionTrace;
use crate::geom::Rect;
use crate::projection::{Mode, ViewName};

pub const NAVIGATE: &str = "navigate_to_object";

/// Normalized program output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavResult {
    pub function: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<[f64; 2]>,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Camera frame (or "panorama") the box was resolved to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl NavResult {
    pub fn failure(error: impl Into<String>) -> Self {
        Self {
            function: "None".into(),
            inputs: None,
            bbox: None,
            error: Some(error.into()),
            frame: None,
            notes: Vec::new(),
        }
    }

    pub fn is_navigation(&self) -> bool {
        self.function == NAVIGATE
    }

    pub fn rect(&self) -> Option<Rect> {
        self.bbox.map(|b| Rect::new(b[0], b[1], b[2], b[3]))
    }
}

fn number(v: &Value) -> Option<f64> {
    v.as_f64().filter(|x| x.is_finite())
}

fn numbers(v: &Value, n: usize) -> Option<Vec<f64>> {
    let items = v.items().ok()?;
    if items.len() != n {
        return None;
    }
    items.iter().map(number).collect()
}

/// Frame of the registered patch whose bounds equal `b` exactly; front wins
/// over left over right.
fn resolve_frame(b: &Rect, trace: &ExecutionTrace, mode: Mode) -> Option<String> {
    let hit = trace
        .patch_registry
        .iter()
        .filter(|r| r.bounds == *b && r.frame.is_some())
        .min_by_key(|r| (frame_rank(r.frame), r.id))
        .and_then(|r| r.frame);
    match (hit, mode) {
        (Some(f), _) => Some(f.name().to_string()),
        (None, Mode::A) => Some(ViewName::Panorama.name().to_string()),
        (None, Mode::B) => None,
    }
}

fn navigate(inputs: [f64; 2], b: [f64; 4], trace: &ExecutionTrace, mode: Mode, notes: Vec<String>) -> NavResult {
    let r = Rect::new(b[0], b[1], b[2], b[3]);
    if r.left > r.right || r.lower > r.upper {
        return NavResult::failure("malformed result: inverted box");
    }
    if !r.contains_point(inputs[0], inputs[1]) {
        return NavResult::failure("malformed result: inputs outside box");
    }
    NavResult {
        function: NAVIGATE.into(),
        inputs: Some(inputs),
        bbox: Some(b),
        error: None,
        frame: resolve_frame(&r, trace, mode),
        notes,
    }
}

/// Turns the program's return value into a [`NavResult`].
pub fn resolve_nav_result(raw: &Value, trace: &mut ExecutionTrace, mode: Mode) -> NavResult {
    let mut notes: Vec<String> = trace
        .notes
        .iter()
        .filter(|n| n.starts_with("navigate_to_object"))
        .cloned()
        .collect();
    match raw {
        Value::Patch(p) => {
            let rec = trace.patch(*p).clone();
            notes.push("normalized".into());
            navigate(
                [rec.horizontal_center(), rec.vertical_center()],
                rec.bounds.as_array(),
                trace,
                mode,
                notes,
            )
        }
        Value::Dict(d) => {
            let get = |k: &str| d.iter().find(|(k2, _)| k2 == k).map(|(_, v)| v);
            let function = match get("function") {
                Some(Value::Str(s)) => s.to_string(),
                Some(Value::None) => "None".into(),
                _ => return NavResult::failure("malformed result"),
            };
            match function.as_str() {
                "None" => NavResult::failure(match get("error") {
                    Some(Value::Str(s)) => s.to_string(),
                    Some(v) if !matches!(v, Value::None) => v.to_string(),
                    _ => "no error message".into(),
                }),
                NAVIGATE | "nav_function" => {
                    if function != NAVIGATE {
                        notes.push(format!("function {function:?} read as {NAVIGATE}"));
                    }
                    let Some(inputs) = get("inputs").and_then(|v| numbers(v, 2)) else {
                        return NavResult::failure("malformed result: inputs must be two numbers");
                    };
                    let inputs = [inputs[0], inputs[1]];
                    let b = match get("box") {
                        Some(v) => match numbers(v, 4) {
                            Some(b) => [b[0], b[1], b[2], b[3]],
                            None => return NavResult::failure("malformed result: box must be four numbers"),
                        },
                        None => {
                            notes.push("box missing; degenerate box at inputs".into());
                            [inputs[0], inputs[1], inputs[0], inputs[1]]
                        }
                    };
                    navigate(inputs, b, trace, mode, notes)
                }
                other => NavResult::failure(format!("unsupported nav function: {other}")),
            }
        }
        Value::Str(s) => NavResult::failure(s.to_string()),
        Value::None => NavResult::failure("program returned no result"),
        _ => NavResult::failure("malformed result"),
    }
}
