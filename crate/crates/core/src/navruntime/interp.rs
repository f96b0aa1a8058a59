use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::rc::Rc;

use super::patches::{coerce_to_numeric, note, patch_distance, token_overlap, Scope};
use super::value::{PatchId, Value};
use super::{ApiCall, ExecConfig, ExecutionTrace, PatchRecord, RuntimeError};
use crate::geom::Rect;
use crate::navlang::ast::*;
use crate::projection::{Mode, PanoramaLayout, ViewName};
use crate::worldsim::{Frame, ViewSet, World};

type R<T> = Result<T, RuntimeError>;

enum Flow {
    Normal,
    Return(Value),
}

const SUMMARY_LIMIT: usize = 200;

fn summarize(s: String) -> String {
    if s.chars().count() <= SUMMARY_LIMIT {
        s
    } else {
        let mut t: String = s.chars().take(SUMMARY_LIMIT).collect();
        t.push_str("...");
        t
    }
}

fn type_err<T>(msg: impl Into<String>) -> R<T> {
    Err(RuntimeError::Type(msg.into()))
}

/// Positional and keyword arguments bound to a parameter list.
struct Args {
    slots: Vec<Option<Value>>,
}

impl Args {
    fn bind(callee: &str, params: &[&str], pos: Vec<Value>, kw: Vec<(String, Value)>) -> R<Args> {
        if pos.len() > params.len() {
            return type_err(format!(
                "{callee}() takes at most {} arguments ({} given)",
                params.len(),
                pos.len()
            ));
        }
        let mut slots: Vec<Option<Value>> = vec![None; params.len()];
        for (i, v) in pos.into_iter().enumerate() {
            slots[i] = Some(v);
        }
        for (k, v) in kw {
            let Some(i) = params.iter().position(|p| *p == k) else {
                return type_err(format!("{callee}() got an unexpected keyword argument '{k}'"));
            };
            if slots[i].is_some() {
                return type_err(format!("{callee}() got multiple values for argument '{k}'"));
            }
            slots[i] = Some(v);
        }
        Ok(Args { slots })
    }

    fn get(&self, i: usize) -> Option<&Value> {
        self.slots[i].as_ref().filter(|v| !matches!(v, Value::None))
    }

    fn req(&self, callee: &str, i: usize, name: &str) -> R<&Value> {
        self.slots[i]
            .as_ref()
            .ok_or_else(|| RuntimeError::Type(format!("{callee}() missing required argument '{name}'")))
    }
}

fn as_str<'v>(v: &'v Value, what: &str) -> R<&'v str> {
    match v {
        Value::Str(s) => Ok(s),
        other => type_err(format!("{what} must be a string, got {}", other.type_name())),
    }
}

fn strings(v: &Value, what: &str) -> R<Vec<String>> {
    match v {
        Value::Str(s) => Ok(vec![s.to_string()]),
        other => other
            .items()?
            .iter()
            .map(|x| as_str(x, what).map(String::from))
            .collect(),
    }
}

pub(crate) struct Interp<'a> {
    scope: Scope<'a>,
    cfg: &'a ExecConfig,
    env: HashMap<String, Value>,
    trace: ExecutionTrace,
    root: Option<PatchId>,
}

impl<'a> Interp<'a> {
    pub fn new(world: &'a World, views: &'a ViewSet, cfg: &'a ExecConfig) -> Self {
        Self {
            scope: Scope {
                world,
                views,
                mode: cfg.mode,
            },
            cfg,
            env: HashMap::new(),
            trace: ExecutionTrace::default(),
            root: None,
        }
    }

    pub fn into_trace(self) -> ExecutionTrace {
        self.trace
    }

    pub fn run(&mut self, ast: &NavAst) -> R<Value> {
        self.env.insert(ast.param.clone(), Value::Image);
        match self.block(&ast.body)? {
            Flow::Return(v) => Ok(v),
            Flow::Normal => Ok(Value::None),
        }
    }

    fn tick(&mut self) -> R<()> {
        if self.trace.steps_used >= self.cfg.step_budget {
            return Err(RuntimeError::StepBudget(self.cfg.step_budget));
        }
        self.trace.steps_used += 1;
        Ok(())
    }

    fn check_len(&self, n: usize) -> R<()> {
        if n > self.cfg.sequence_cap {
            Err(RuntimeError::SequenceCap(self.cfg.sequence_cap))
        } else {
            Ok(())
        }
    }

    // ---- patches ----

    fn register(
        &mut self,
        bounds: Rect,
        frame: Option<ViewName>,
        source_object: Option<String>,
        parent: Option<PatchId>,
        created_by: &str,
    ) -> PatchId {
        let id = self.trace.patch_registry.len();
        self.trace.patch_registry.push(PatchRecord {
            id,
            bounds,
            frame,
            source_object,
            parent: parent.map(|p| p.0),
            created_by: created_by.to_string(),
        });
        PatchId(id)
    }

    fn rec(&self, id: PatchId) -> &PatchRecord {
        &self.trace.patch_registry[id.0]
    }

    /// Root patch over the whole representation, created on first use.
    fn root(&mut self) -> PatchId {
        if let Some(r) = self.root {
            return r;
        }
        let (bounds, frame) = match self.scope.mode {
            Mode::A => {
                let l = PanoramaLayout::STANDARD;
                (Rect::new(0.0, 0.0, l.width(), l.frame_height), Some(ViewName::Panorama))
            }
            Mode::B => (self.scope.views.frame(Frame::Front).image_rect(), None),
        };
        let id = self.register(bounds, frame, None, None, "root");
        self.root = Some(id);
        id
    }

    fn patch_of(&mut self, v: &Value, what: &str) -> R<PatchId> {
        match v {
            Value::Patch(p) => Ok(*p),
            Value::Image => Ok(self.root()),
            other => type_err(format!("{what} must be an ImagePatch, got {}", other.type_name())),
        }
    }

    fn crop(&mut self, base: PatchId, r: Rect, created_by: &str) -> PatchId {
        let parent = self.rec(base).clone();
        let bounds = r.intersect(&parent.bounds);
        self.register(bounds, parent.frame, None, Some(base), created_by)
    }

    fn image_patch(&mut self, a: &Args) -> R<Value> {
        let image = a.req("ImagePatch", 0, "image")?.clone();
        let mut base = self.patch_of(&image, "image")?;
        if let Some(fv) = a.get(5) {
            let name = as_str(fv, "frame")?;
            let f = Frame::parse(name)
                .ok_or_else(|| RuntimeError::Value(format!("unknown frame {name:?}")))?;
            let rec = self.rec(base).clone();
            base = match rec.frame {
                None => {
                    let full = self.scope.views.frame(f).image_rect();
                    self.register(
                        full.intersect(&rec.bounds),
                        Some(ViewName::Frame(f)),
                        None,
                        Some(base),
                        "ImagePatch",
                    )
                }
                Some(ViewName::Panorama) => {
                    let (lo, hi) = PanoramaLayout::STANDARD.span(f);
                    self.crop(base, Rect::new(lo, rec.bounds.lower, hi, rec.bounds.upper), "ImagePatch")
                }
                Some(ViewName::Frame(g)) if g == f => base,
                Some(ViewName::Frame(g)) => {
                    return Err(RuntimeError::Value(format!("patch in frame {g} has no {f} view")));
                }
            };
        }
        let b = self.rec(base).bounds;
        let coords: Vec<Option<f64>> = (1..5)
            .map(|i| a.get(i).map(|v| v.number()).transpose())
            .collect::<R<_>>()?;
        if coords.iter().any(Option::is_some) {
            let r = Rect {
                left: coords[0].unwrap_or(b.left),
                lower: coords[1].unwrap_or(b.lower),
                right: coords[2].unwrap_or(b.right),
                upper: coords[3].unwrap_or(b.upper),
            };
            return Ok(Value::Patch(self.crop(base, r, "ImagePatch")));
        }
        let rec = self.rec(base).clone();
        Ok(Value::Patch(self.register(
            rec.bounds,
            rec.frame,
            rec.source_object,
            Some(base),
            "ImagePatch",
        )))
    }

    fn find(&mut self, p: PatchId, name: &str) -> R<Vec<Value>> {
        let rec = self.rec(p).clone();
        let found = self.scope.detect(&rec, Some(name));
        self.check_len(found.len())?;
        Ok(found
            .into_iter()
            .map(|d| Value::Patch(self.register(d.rect, Some(d.view), Some(d.object_id), Some(p), "find")))
            .collect())
    }

    fn patch_attr(&self, p: PatchId, attr: &str) -> R<Value> {
        let r = self.rec(p);
        let b = r.bounds;
        Ok(match attr {
            "left" => Value::Float(b.left),
            "lower" => Value::Float(b.lower),
            "right" => Value::Float(b.right),
            "upper" => Value::Float(b.upper),
            "width" => Value::Float(b.width()),
            "height" => Value::Float(b.height()),
            "horizontal_center" => Value::Float(r.horizontal_center()),
            "vertical_center" => Value::Float(r.vertical_center()),
            "frame" => r.frame.map_or(Value::None, |f| Value::str(f.name())),
            other => return Err(RuntimeError::Name(format!("ImagePatch has no attribute '{other}'"))),
        })
    }

    fn patch_method(&mut self, p: PatchId, name: &str, pos: Vec<Value>, kw: Vec<(String, Value)>) -> R<Value> {
        match name {
            "find" | "exists" => {
                let a = Args::bind(name, &["object_name"], pos, kw)?;
                let q = as_str(a.req(name, 0, "object_name")?, "object_name")?.to_string();
                let found = self.find(p, &q)?;
                Ok(if name == "find" {
                    Value::list(found)
                } else {
                    Value::Bool(!found.is_empty())
                })
            }
            "verify_property" => {
                let a = Args::bind(name, &["object_name", "visual_property"], pos, kw)?;
                let obj = as_str(a.req(name, 0, "object_name")?, "object_name")?.to_string();
                let prop = as_str(a.req(name, 1, "visual_property")?, "visual_property")?.to_string();
                let rec = self.rec(p).clone();
                match self.scope.dominant(&rec, Some(&obj)) {
                    Some(id) => Ok(Value::Bool(
                        self.scope
                            .world
                            .scene
                            .object(&id)
                            .is_some_and(|o| o.has_attribute(&prop)),
                    )),
                    None => {
                        note(
                            &mut self.trace,
                            format!("verify_property: no {obj} in patch #{}; returned False", p.0),
                        );
                        Ok(Value::Bool(false))
                    }
                }
            }
            "best_text_match" => {
                let a = Args::bind(name, &["option_list", "prefix"], pos, kw)?;
                let options = strings(a.req(name, 0, "option_list")?, "option")?;
                if options.is_empty() {
                    return Err(RuntimeError::Value("best_text_match() needs at least one option".into()));
                }
                let rec = self.rec(p).clone();
                let desc = self
                    .scope
                    .dominant(&rec, None)
                    .map(|id| self.scope.descriptor_tokens(&id))
                    .unwrap_or_default();
                let mut best = 0;
                let mut best_score = 0;
                for (i, o) in options.iter().enumerate() {
                    let s = token_overlap(o, &desc);
                    if s > best_score {
                        best = i;
                        best_score = s;
                    }
                }
                Ok(Value::str(&options[best]))
            }
            "simple_query" => {
                let a = Args::bind(name, &["question"], pos, kw)?;
                let rec = self.rec(p).clone();
                let dom = self.scope.dominant(&rec, None);
                match a.get(0) {
                    None => Ok(match dom.and_then(|id| self.scope.world.scene.object(&id)) {
                        Some(o) => Value::str(&o.label),
                        None => Value::str("nothing"),
                    }),
                    Some(q) => {
                        let q = as_str(q, "question")?.to_string();
                        match dom.and_then(|id| self.scope.qa_answer(&id, &q)) {
                            Some(ans) => Ok(Value::str(ans)),
                            None => {
                                note(&mut self.trace, format!("simple_query: no fixture for {q:?}"));
                                Ok(Value::str("no fixture"))
                            }
                        }
                    }
                }
            }
            "compute_depth" => {
                Args::bind(name, &[], pos, kw)?;
                let rec = self.rec(p).clone();
                Ok(Value::Float(self.scope.median_depth(&rec)))
            }
            "crop" => {
                let a = Args::bind(name, &["left", "lower", "right", "upper"], pos, kw)?;
                let c: Vec<f64> = ["left", "lower", "right", "upper"]
                    .iter()
                    .enumerate()
                    .map(|(i, n)| a.req("crop", i, n)?.number())
                    .collect::<R<_>>()?;
                let r = Rect {
                    left: c[0],
                    lower: c[1],
                    right: c[2],
                    upper: c[3],
                };
                Ok(Value::Patch(self.crop(p, r, "crop")))
            }
            "overlaps_with" => {
                let a = Args::bind(name, &["left", "lower", "right", "upper"], pos, kw)?;
                let c: Vec<f64> = ["left", "lower", "right", "upper"]
                    .iter()
                    .enumerate()
                    .map(|(i, n)| a.req(name, i, n)?.number())
                    .collect::<R<_>>()?;
                let b = self.rec(p).bounds;
                Ok(Value::Bool(
                    b.left <= c[2] && b.right >= c[0] && b.lower <= c[3] && b.upper >= c[1],
                ))
            }
            other => Err(RuntimeError::Name(format!("ImagePatch has no method '{other}'"))),
        }
    }

    // ---- free functions ----

    fn call_builtin(&mut self, name: &str, pos: Vec<Value>, kw: Vec<(String, Value)>) -> R<Value> {
        match name {
            "ImagePatch" => {
                let a = Args::bind(name, &["image", "left", "lower", "right", "upper", "frame"], pos, kw)?;
                self.image_patch(&a)
            }
            "len" => {
                let a = Args::bind(name, &["obj"], pos, kw)?;
                Ok(Value::Int(match a.req(name, 0, "obj")? {
                    Value::Str(s) => s.chars().count() as i64,
                    Value::Dict(d) => d.len() as i64,
                    other => other.items()?.len() as i64,
                }))
            }
            "abs" => {
                let a = Args::bind(name, &["x"], pos, kw)?;
                Ok(match a.req(name, 0, "x")? {
                    Value::Int(i) => Value::Int(i.checked_abs().ok_or_else(|| RuntimeError::Value("overflow".into()))?),
                    Value::Bool(b) => Value::Int(*b as i64),
                    Value::Float(f) => Value::Float(f.abs()),
                    other => return type_err(format!("bad operand for abs(): {}", other.type_name())),
                })
            }
            "range" => {
                let a = Args::bind(name, &["start", "stop", "step"], pos, kw)?;
                let ints: Vec<Option<i64>> = (0..3)
                    .map(|i| {
                        a.slots[i]
                            .as_ref()
                            .map(|v| v.as_int().ok_or_else(|| RuntimeError::Type("range() needs integers".into())))
                            .transpose()
                    })
                    .collect::<R<_>>()?;
                let (start, stop, step) = match (ints[0], ints[1], ints[2]) {
                    (Some(n), None, None) => (0, n, 1),
                    (Some(a0), Some(b0), None) => (a0, b0, 1),
                    (Some(a0), Some(b0), Some(s)) => (a0, b0, s),
                    _ => return type_err("range() expects 1 to 3 arguments"),
                };
                if step == 0 {
                    return Err(RuntimeError::Value("range() step must not be zero".into()));
                }
                let n = if step > 0 {
                    ((stop - start).max(0) + step - 1) / step
                } else {
                    ((start - stop).max(0) - step - 1) / -step
                };
                self.check_len(n as usize)?;
                Ok(Value::list((0..n).map(|i| Value::Int(start + i * step)).collect()))
            }
            "enumerate" => {
                let a = Args::bind(name, &["iterable", "start"], pos, kw)?;
                let start = a.get(1).map_or(Ok(0), |v| {
                    v.as_int().ok_or_else(|| RuntimeError::Type("enumerate() start must be an int".into()))
                })?;
                let items = a.req(name, 0, "iterable")?.items()?;
                Ok(Value::list(
                    items
                        .into_iter()
                        .enumerate()
                        .map(|(i, v)| Value::pair(Value::Int(start + i as i64), v))
                        .collect(),
                ))
            }
            "sorted" => {
                let a = Args::bind(name, &["iterable", "key", "reverse"], pos, kw)?;
                let mut items = a.req(name, 0, "iterable")?.items()?;
                let key = a.get(1).cloned();
                let reverse = a.get(2).is_some_and(Value::truthy);
                self.sort_values(&mut items, key.as_ref(), reverse)?;
                Ok(Value::list(items))
            }
            "min" | "max" => self.min_max(name, pos, kw),
            _ => self.api_function(name, pos, kw),
        }
    }

    fn min_max(&mut self, name: &str, mut pos: Vec<Value>, kw: Vec<(String, Value)>) -> R<Value> {
        let mut key = None;
        for (k, v) in kw {
            match k.as_str() {
                "key" => key = Some(v),
                _ => return type_err(format!("{name}() got an unexpected keyword argument '{k}'")),
            }
        }
        let items = match pos.len() {
            0 => return type_err(format!("{name}() expects at least one argument")),
            1 => pos.remove(0).items()?,
            _ => pos,
        };
        if items.is_empty() {
            return Err(RuntimeError::Value(format!("{name}() arg is an empty sequence")));
        }
        let keys = self.keys(&items, key.as_ref())?;
        let mut best = 0;
        for i in 1..items.len() {
            let o = keys[i].py_cmp(&keys[best])?;
            if (name == "min" && o == Ordering::Less) || (name == "max" && o == Ordering::Greater) {
                best = i;
            }
        }
        Ok(items[best].clone())
    }

    fn api_function(&mut self, name: &str, pos: Vec<Value>, kw: Vec<(String, Value)>) -> R<Value> {
        match name {
            "bool_to_yesno" => {
                let a = Args::bind(name, &["bool_answer"], pos, kw)?;
                Ok(Value::str(if a.req(name, 0, "bool_answer")?.truthy() { "yes" } else { "no" }))
            }
            "coerce_to_numeric" => {
                let a = Args::bind(name, &["string"], pos, kw)?;
                let v = a.req(name, 0, "string")?;
                match v {
                    Value::Str(s) => Ok(Value::Float(coerce_to_numeric(s)?)),
                    other => Ok(Value::Float(other.number()?)),
                }
            }
            "distance" => {
                let a = Args::bind(name, &["patch_a", "patch_b"], pos, kw)?;
                let pa = self.patch_of(a.req(name, 0, "patch_a")?, "patch_a")?;
                let pb = self.patch_of(a.req(name, 1, "patch_b")?, "patch_b")?;
                let (ra, rb) = (self.rec(pa).clone(), self.rec(pb).clone());
                if self.scope.mode == Mode::B && ra.frame != rb.frame {
                    note(
                        &mut self.trace,
                        format!(
                            "distance between patches #{} and #{} in different frames uses raw coordinates",
                            pa.0, pb.0
                        ),
                    );
                }
                Ok(Value::Float(patch_distance(&ra.bounds, &rb.bounds)))
            }
            "best_image_match" => {
                let a = Args::bind(name, &["list_patches", "content", "return_index"], pos, kw)?;
                let patches = a.req(name, 0, "list_patches")?.items()?;
                if patches.is_empty() {
                    return Err(RuntimeError::Value("best_image_match() needs at least one patch".into()));
                }
                let content = strings(a.req(name, 1, "content")?, "content")?;
                let mut best = 0;
                let mut best_score = 0;
                for (i, pv) in patches.iter().enumerate() {
                    let p = self.patch_of(pv, "list_patches item")?;
                    let rec = self.rec(p).clone();
                    let desc = self
                        .scope
                        .dominant(&rec, None)
                        .map(|id| self.scope.descriptor_tokens(&id))
                        .unwrap_or_default();
                    let s: usize = content.iter().map(|c| token_overlap(c, &desc)).sum();
                    if s > best_score {
                        best = i;
                        best_score = s;
                    }
                }
                Ok(if a.get(2).is_some_and(Value::truthy) {
                    Value::Int(best as i64)
                } else {
                    patches[best].clone()
                })
            }
            "llm_query" => {
                let a = Args::bind(name, &["question", "long_answer"], pos, kw)?;
                let q = as_str(a.req(name, 0, "question")?, "question")?.to_string();
                match self.scope.qa_answer("llm", &q) {
                    Some(ans) => Ok(Value::str(ans)),
                    None => {
                        note(&mut self.trace, format!("llm_query: no fixture for {q:?}"));
                        Ok(Value::str("no fixture"))
                    }
                }
            }
            "navigate_to_object" => {
                let a = Args::bind(name, &["x", "y"], pos, kw)?;
                let x = a.req(name, 0, "x")?.number()?;
                let y = a.req(name, 1, "y")?.number()?;
                let hit = self
                    .trace
                    .patch_registry
                    .iter()
                    .filter(|r| r.horizontal_center() == x && r.vertical_center() == y && r.frame.is_some())
                    .min_by_key(|r| (frame_rank(r.frame), r.id))
                    .map(|r| r.bounds);
                let b = match hit {
                    Some(b) => b,
                    None => {
                        note(
                            &mut self.trace,
                            format!("navigate_to_object: no patch centered at ({x}, {y}); degenerate box"),
                        );
                        Rect::new(x, y, x, y)
                    }
                };
                Ok(nav_dict(x, y, b))
            }
            other => Err(RuntimeError::Name(format!("name '{other}' is not defined"))),
        }
    }

    // ---- sorting ----

    fn call_value(&mut self, f: &Value, args: Vec<Value>) -> R<Value> {
        match f {
            Value::Lambda(l) => {
                let (param, body) = (&l.0, &l.1);
                let [arg] = <[Value; 1]>::try_from(args)
                    .map_err(|_| RuntimeError::Type("lambda takes exactly one argument".into()))?;
                let saved = self.env.insert(param.clone(), arg);
                let out = self.eval(body);
                match saved {
                    Some(v) => self.env.insert(param.clone(), v),
                    None => self.env.remove(param),
                };
                out
            }
            Value::Builtin(n) => self.call_builtin(n, args, Vec::new()),
            Value::Method(recv, m) => self.call_method(recv, m, args, Vec::new()),
            other => type_err(format!("'{}' object is not callable", other.type_name())),
        }
    }

    fn keys(&mut self, items: &[Value], key: Option<&Value>) -> R<Vec<Value>> {
        match key {
            None => Ok(items.to_vec()),
            Some(k) => items.iter().map(|v| self.call_value(k, vec![v.clone()])).collect(),
        }
    }

    /// Stable sort by precomputed keys; comparison errors abort the sort.
    fn sort_values(&mut self, items: &mut Vec<Value>, key: Option<&Value>, reverse: bool) -> R<()> {
        let keys = self.keys(items, key)?;
        let mut idx: Vec<usize> = (0..items.len()).collect();
        let err: Cell<Option<RuntimeError>> = Cell::new(None);
        idx.sort_by(|&a, &b| {
            let o = keys[a].py_cmp(&keys[b]).unwrap_or_else(|e| {
                err.set(Some(e));
                Ordering::Equal
            });
            if reverse {
                o.reverse()
            } else {
                o
            }
        });
        if let Some(e) = err.take() {
            return Err(e);
        }
        *items = idx.into_iter().map(|i| items[i].clone()).collect();
        Ok(())
    }

    fn call_method(&mut self, recv: &Value, name: &str, pos: Vec<Value>, kw: Vec<(String, Value)>) -> R<Value> {
        match recv {
            Value::Patch(p) => self.patch_method(*p, name, pos, kw),
            Value::Image => {
                let root = self.root();
                self.patch_method(root, name, pos, kw)
            }
            Value::List(l) => match name {
                "append" => {
                    let a = Args::bind(name, &["object"], pos, kw)?;
                    let v = a.req(name, 0, "object")?.clone();
                    let n = l.borrow().len() + 1;
                    self.check_len(n)?;
                    l.borrow_mut().push(v);
                    Ok(Value::None)
                }
                "sort" => {
                    let a = Args::bind(name, &["key", "reverse"], pos, kw)?;
                    let key = a.get(0).cloned();
                    let reverse = a.get(1).is_some_and(Value::truthy);
                    let mut items = l.borrow().clone();
                    self.sort_values(&mut items, key.as_ref(), reverse)?;
                    *l.borrow_mut() = items;
                    Ok(Value::None)
                }
                other => Err(RuntimeError::Name(format!("'list' object has no attribute '{other}'"))),
            },
            other => type_err(format!("'{}' object has no method '{name}'", other.type_name())),
        }
    }

    fn record(&mut self, name: &str, pos: &[Value], kw: &[(String, Value)], result: &R<Value>) {
        let mut args: Vec<String> = pos.iter().map(|v| v.to_string()).collect();
        args.extend(kw.iter().map(|(k, v)| format!("{k}={v}")));
        let result = match result {
            Ok(v) => v.to_string(),
            Err(e) => format!("error: {e}"),
        };
        self.trace.api_calls.push(ApiCall {
            name: name.to_string(),
            args: summarize(args.join(", ")),
            result: summarize(result),
        });
    }

    // ---- evaluation ----

    fn block(&mut self, body: &[Stmt]) -> R<Flow> {
        for s in body {
            if let Flow::Return(v) = self.stmt(s).map_err(|e| at(e, s.span))? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn assign(&mut self, t: &Target, v: Value) -> R<()> {
        match t {
            Target::Name(n) => {
                self.env.insert(n.clone(), v);
            }
            Target::Pair(a, b) => {
                let items = v.items()?;
                if items.len() != 2 {
                    return Err(RuntimeError::Value(format!(
                        "expected 2 values to unpack, got {}",
                        items.len()
                    )));
                }
                let mut it = items.into_iter();
                self.env.insert(a.clone(), it.next().unwrap());
                self.env.insert(b.clone(), it.next().unwrap());
            }
        }
        Ok(())
    }

    fn stmt(&mut self, s: &Stmt) -> R<Flow> {
        self.tick()?;
        match &s.kind {
            StmtKind::Assign { target, value } => {
                let v = self.eval(value)?;
                self.assign(target, v)?;
            }
            StmtKind::AugAssign { target, op, value } => {
                let cur = self
                    .env
                    .get(target)
                    .cloned()
                    .ok_or_else(|| RuntimeError::Name(format!("name '{target}' is not defined")))?;
                let rhs = self.eval(value)?;
                let v = self.binop(*op, cur, rhs)?;
                self.env.insert(target.clone(), v);
            }
            StmtKind::Expr(e) => {
                self.eval(e)?;
            }
            StmtKind::If { test, body, orelse } => {
                let branch = if self.eval(test)?.truthy() { body } else { orelse };
                return self.block(branch);
            }
            StmtKind::For { target, iter, body } => {
                let items = self.eval(iter)?.items()?;
                for v in items {
                    self.tick()?;
                    self.assign(target, v)?;
                    if let Flow::Return(r) = self.block(body)? {
                        return Ok(Flow::Return(r));
                    }
                }
            }
            StmtKind::Return(v) => {
                let v = match v {
                    Some(e) => self.eval(e)?,
                    None => Value::None,
                };
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn eval(&mut self, e: &Expr) -> R<Value> {
        self.tick()?;
        match &e.kind {
            ExprKind::Name(n) => match self.env.get(n) {
                Some(v) => Ok(v.clone()),
                None if is_builtin(n) => Ok(Value::Builtin(builtin_name(n))),
                None => Err(RuntimeError::Name(format!("name '{n}' is not defined"))),
            },
            ExprKind::Int(i) => Ok(Value::Int(*i)),
            ExprKind::Float(f) => Ok(Value::Float(*f)),
            ExprKind::Str(s) => Ok(Value::str(s)),
            ExprKind::Bool(b) => Ok(Value::Bool(*b)),
            ExprKind::None => Ok(Value::None),
            ExprKind::Attribute { value, attr } => {
                let v = self.eval(value)?;
                match &v {
                    Value::Patch(p) => self.patch_attr(*p, attr),
                    Value::Image => {
                        let r = self.root();
                        self.patch_attr(r, attr)
                    }
                    _ => Ok(Value::Method(Rc::new(v), Rc::from(attr.as_str()))),
                }
            }
            ExprKind::Call { func, args, keywords } => {
                let mut pos = Vec::with_capacity(args.len());
                let mut kw = Vec::with_capacity(keywords.len());
                let (recv, name) = match &func.kind {
                    ExprKind::Attribute { value, attr } => (Some(self.eval(value)?), attr.clone()),
                    ExprKind::Name(n) if !self.env.contains_key(n) => (None, n.clone()),
                    _ => {
                        let f = self.eval(func)?;
                        for a in args {
                            pos.push(self.eval(a)?);
                        }
                        return self.call_value(&f, pos);
                    }
                };
                for a in args {
                    pos.push(self.eval(a)?);
                }
                for k in keywords {
                    kw.push((k.name.clone(), self.eval(&k.value)?));
                }
                let traced = match &recv {
                    Some(Value::Patch(_)) | Some(Value::Image) => true,
                    None => crate::navlang::API_FUNCTIONS.contains(&name.as_str()) || name == "ImagePatch",
                    _ => false,
                };
                let out = match &recv {
                    Some(r) => {
                        if !matches!(r, Value::Patch(_) | Value::Image) && name == "find" {
                            return type_err(format!("'{}' object has no method 'find'", r.type_name()));
                        }
                        self.call_method(r, &name, pos.clone(), kw.clone())
                    }
                    None => {
                        if !is_builtin(&name) {
                            return Err(RuntimeError::Name(format!("name '{name}' is not defined")));
                        }
                        self.call_builtin(&name, pos.clone(), kw.clone())
                    }
                };
                if traced {
                    let label = match &recv {
                        Some(Value::Patch(p)) => format!("patch#{}.{name}", p.0),
                        Some(_) => format!("image.{name}"),
                        None => name.clone(),
                    };
                    self.record(&label, &pos, &kw, &out);
                }
                out
            }
            ExprKind::Subscript { value, index } => {
                let v = self.eval(value)?;
                let i = self.eval(index)?;
                subscript(&v, &i)
            }
            ExprKind::Compare { left, ops, comparators } => {
                let mut lhs = self.eval(left)?;
                for (op, c) in ops.iter().zip(comparators) {
                    let rhs = self.eval(c)?;
                    if !compare(*op, &lhs, &rhs)? {
                        return Ok(Value::Bool(false));
                    }
                    lhs = rhs;
                }
                Ok(Value::Bool(true))
            }
            ExprKind::BoolOp { op, values } => {
                let mut last = Value::None;
                for v in values {
                    last = self.eval(v)?;
                    let t = last.truthy();
                    if (*op == BoolOp::And && !t) || (*op == BoolOp::Or && t) {
                        return Ok(last);
                    }
                }
                Ok(last)
            }
            ExprKind::Not(v) => Ok(Value::Bool(!self.eval(v)?.truthy())),
            ExprKind::Neg(v) => match self.eval(v)? {
                Value::Int(i) => Ok(Value::Int(-i)),
                Value::Bool(b) => Ok(Value::Int(-(b as i64))),
                Value::Float(f) => Ok(Value::Float(-f)),
                other => type_err(format!("bad operand for unary -: {}", other.type_name())),
            },
            ExprKind::BinOp { left, op, right } => {
                let l = self.eval(left)?;
                let r = self.eval(right)?;
                self.binop(*op, l, r)
            }
            ExprKind::List(items) => {
                self.check_len(items.len())?;
                let vs = items.iter().map(|i| self.eval(i)).collect::<R<Vec<_>>>()?;
                Ok(Value::list(vs))
            }
            ExprKind::Pair(a, b) => {
                let a = self.eval(a)?;
                let b = self.eval(b)?;
                Ok(Value::pair(a, b))
            }
            ExprKind::Dict(entries) => {
                let mut out: Vec<(String, Value)> = Vec::with_capacity(entries.len());
                for (k, v) in entries {
                    let v = self.eval(v)?;
                    match out.iter_mut().find(|(k2, _)| k2 == k) {
                        Some(slot) => slot.1 = v,
                        None => out.push((k.clone(), v)),
                    }
                }
                Ok(Value::Dict(Rc::new(out)))
            }
            ExprKind::Lambda { param, body } => Ok(Value::Lambda(Rc::new((param.clone(), (**body).clone())))),
        }
    }

    fn binop(&self, op: BinOp, l: Value, r: Value) -> R<Value> {
        match (&l, &r) {
            (Value::Str(a), Value::Str(b)) if op == BinOp::Add => return Ok(Value::str(format!("{a}{b}"))),
            (Value::List(a), Value::List(b)) if op == BinOp::Add => {
                let mut v = a.borrow().clone();
                v.extend(b.borrow().iter().cloned());
                self.check_len(v.len())?;
                return Ok(Value::list(v));
            }
            _ => {}
        }
        if let (Some(a), Some(b)) = (l.as_int(), r.as_int()) {
            return int_op(op, a, b);
        }
        match (l.as_f64(), r.as_f64()) {
            (Some(a), Some(b)) => float_op(op, a, b),
            _ => type_err(format!(
                "unsupported operand types for {}: {} and {}",
                op.symbol(),
                l.type_name(),
                r.type_name()
            )),
        }
    }
}

fn at(e: RuntimeError, span: Span) -> RuntimeError {
    match e {
        RuntimeError::At { .. } | RuntimeError::StepBudget(_) => e,
        e => RuntimeError::At {
            line: span.line,
            error: Box::new(e),
        },
    }
}

fn int_op(op: BinOp, a: i64, b: i64) -> R<Value> {
    let overflow = || RuntimeError::Value("integer overflow".into());
    Ok(match op {
        BinOp::Add => Value::Int(a.checked_add(b).ok_or_else(overflow)?),
        BinOp::Sub => Value::Int(a.checked_sub(b).ok_or_else(overflow)?),
        BinOp::Mul => Value::Int(a.checked_mul(b).ok_or_else(overflow)?),
        BinOp::Div => {
            if b == 0 {
                return Err(RuntimeError::ZeroDivision);
            }
            Value::Float(a as f64 / b as f64)
        }
        BinOp::FloorDiv | BinOp::Mod => {
            if b == 0 {
                return Err(RuntimeError::ZeroDivision);
            }
            // Quotient floors toward negative infinity, as in Python.
            let fq = if (a % b != 0) && ((a < 0) != (b < 0)) { a / b - 1 } else { a / b };
            if op == BinOp::FloorDiv {
                Value::Int(fq)
            } else {
                Value::Int(a - fq * b)
            }
        }
    })
}

fn float_op(op: BinOp, a: f64, b: f64) -> R<Value> {
    Ok(Value::Float(match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => {
            if b == 0.0 {
                return Err(RuntimeError::ZeroDivision);
            }
            a / b
        }
        BinOp::FloorDiv => {
            if b == 0.0 {
                return Err(RuntimeError::ZeroDivision);
            }
            (a / b).floor()
        }
        BinOp::Mod => {
            if b == 0.0 {
                return Err(RuntimeError::ZeroDivision);
            }
            a - (a / b).floor() * b
        }
    }))
}

fn normalize_index(i: &Value, len: usize) -> R<usize> {
    let i = i
        .as_int()
        .ok_or_else(|| RuntimeError::Type(format!("indices must be integers, not {}", i.type_name())))?;
    let j = if i < 0 { i + len as i64 } else { i };
    if j < 0 || j >= len as i64 {
        return Err(RuntimeError::Index(format!("index {i} out of range for length {len}")));
    }
    Ok(j as usize)
}

fn subscript(v: &Value, i: &Value) -> R<Value> {
    match v {
        Value::List(l) => {
            let l = l.borrow();
            Ok(l[normalize_index(i, l.len())?].clone())
        }
        Value::Pair(p) => Ok(if normalize_index(i, 2)? == 0 { p.0.clone() } else { p.1.clone() }),
        Value::Str(s) => {
            let chars: Vec<char> = s.chars().collect();
            Ok(Value::str(chars[normalize_index(i, chars.len())?].to_string()))
        }
        Value::Dict(d) => {
            let k = as_str(i, "key")?;
            d.iter()
                .find(|(k2, _)| k2 == k)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| RuntimeError::Key(format!("'{k}'")))
        }
        other => type_err(format!("'{}' object is not subscriptable", other.type_name())),
    }
}

fn contains(container: &Value, item: &Value) -> R<bool> {
    match container {
        Value::Str(s) => Ok(s.contains(as_str(item, "left operand of 'in'")?)),
        Value::Dict(d) => Ok(match item {
            Value::Str(k) => d.iter().any(|(k2, _)| k2.as_str() == &**k),
            _ => false,
        }),
        other => Ok(other.items()?.iter().any(|x| x.py_eq(item))),
    }
}

fn identical(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::None, Value::None) | (Value::Image, Value::Image) => true,
        (Value::Bool(x), Value::Bool(y)) => x == y,
        (Value::Patch(x), Value::Patch(y)) => x == y,
        (Value::List(x), Value::List(y)) => Rc::ptr_eq(x, y),
        _ => false,
    }
}

fn compare(op: CmpOp, a: &Value, b: &Value) -> R<bool> {
    Ok(match op {
        CmpOp::Eq => a.py_eq(b),
        CmpOp::NotEq => !a.py_eq(b),
        CmpOp::Lt => a.py_cmp(b)? == Ordering::Less,
        CmpOp::LtE => a.py_cmp(b)? != Ordering::Greater,
        CmpOp::Gt => a.py_cmp(b)? == Ordering::Greater,
        CmpOp::GtE => a.py_cmp(b)? != Ordering::Less,
        CmpOp::In => contains(b, a)?,
        CmpOp::NotIn => !contains(b, a)?,
        CmpOp::Is => identical(a, b),
        CmpOp::IsNot => !identical(a, b),
    })
}

const BUILTINS: &[&str] = &[
    "ImagePatch",
    "len",
    "abs",
    "range",
    "enumerate",
    "sorted",
    "min",
    "max",
    "bool_to_yesno",
    "coerce_to_numeric",
    "distance",
    "best_image_match",
    "llm_query",
    "navigate_to_object",
];

fn is_builtin(n: &str) -> bool {
    BUILTINS.contains(&n)
}

fn builtin_name(n: &str) -> &'static str {
    BUILTINS.iter().find(|b| **b == n).copied().unwrap_or("?")
}

/// Frame precedence for provenance ties: front, left, right, panorama.
pub(crate) fn frame_rank(f: Option<ViewName>) -> u8 {
    match f {
        Some(ViewName::Frame(Frame::Front)) => 0,
        Some(ViewName::Frame(Frame::Left)) => 1,
        Some(ViewName::Frame(Frame::Right)) => 2,
        Some(ViewName::Panorama) => 3,
        None => 4,
    }
}

fn nav_dict(x: f64, y: f64, b: Rect) -> Value {
    Value::Dict(Rc::new(vec![
        ("function".into(), Value::str("navigate_to_object")),
        ("inputs".into(), Value::pair(Value::Float(x), Value::Float(y))),
        (
            "box".into(),
            Value::list(b.as_array().iter().map(|c| Value::Float(*c)).collect()),
        ),
    ]))
}
