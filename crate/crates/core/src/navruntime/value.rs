use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::rc::Rc;

use super::RuntimeError;

/// Index into the execution's patch registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatchId(pub usize);

/// Interpreter value. Lists are the only mutable values and are shared by
/// reference, as in Python.
#[derive(Debug, Clone)]
pub enum Value {
    None,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(Rc<str>),
    List(Rc<RefCell<Vec<Value>>>),
    Pair(Rc<(Value, Value)>),
    Dict(Rc<Vec<(String, Value)>>),
    Patch(PatchId),
    /// The opaque image handed to the entry point.
    Image,
    Builtin(&'static str),
    /// A bound method awaiting its call, e.g. `patches.sort`.
    Method(Rc<Value>, Rc<str>),
    Lambda(Rc<(String, crate::navlang::ast::Expr)>),
}

impl Value {
    pub fn str(s: impl AsRef<str>) -> Value {
        Value::Str(Rc::from(s.as_ref()))
    }

    pub fn list(items: Vec<Value>) -> Value {
        Value::List(Rc::new(RefCell::new(items)))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Rc::new((a, b)))
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::None => "NoneType",
            Value::Bool(_) => "bool",
            Value::Int(_) => "int",
            Value::Float(_) => "float",
            Value::Str(_) => "str",
            Value::List(_) => "list",
            Value::Pair(_) => "tuple",
            Value::Dict(_) => "dict",
            Value::Patch(_) => "ImagePatch",
            Value::Image => "image",
            Value::Builtin(_) | Value::Method(..) => "builtin_function",
            Value::Lambda(_) => "function",
        }
    }

    pub fn truthy(&self) -> bool {
        match self {
            Value::None => false,
            Value::Bool(b) => *b,
            Value::Int(i) => *i != 0,
            Value::Float(f) => *f != 0.0,
            Value::Str(s) => !s.is_empty(),
            Value::List(l) => !l.borrow().is_empty(),
            Value::Dict(d) => !d.is_empty(),
            _ => true,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Bool(b) => Some(*b as i64 as f64),
            Value::Int(i) => Some(*i as f64),
            Value::Float(f) => Some(*f),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Bool(b) => Some(*b as i64),
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn number(&self) -> Result<f64, RuntimeError> {
        self.as_f64()
            .ok_or_else(|| RuntimeError::Type(format!("expected a number, got {}", self.type_name())))
    }

    /// Items of an iterable value.
    pub fn items(&self) -> Result<Vec<Value>, RuntimeError> {
        match self {
            Value::List(l) => Ok(l.borrow().clone()),
            Value::Pair(p) => Ok(vec![p.0.clone(), p.1.clone()]),
            Value::Str(s) => Ok(s.chars().map(|c| Value::str(c.to_string())).collect()),
            Value::Dict(d) => Ok(d.iter().map(|(k, _)| Value::str(k)).collect()),
            other => Err(RuntimeError::Type(format!("{} is not iterable", other.type_name()))),
        }
    }

    pub fn py_eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::None, Value::None) | (Value::Image, Value::Image) => true,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::List(a), Value::List(b)) => {
                let (a, b) = (a.borrow(), b.borrow());
                a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x.py_eq(y))
            }
            (Value::Pair(a), Value::Pair(b)) => a.0.py_eq(&b.0) && a.1.py_eq(&b.1),
            (Value::Dict(a), Value::Dict(b)) => {
                a.len() == b.len()
                    && a.iter().all(|(k, v)| b.iter().any(|(k2, v2)| k == k2 && v.py_eq(v2)))
            }
            (Value::Patch(a), Value::Patch(b)) => a == b,
            (a, b) => match (a.as_f64(), b.as_f64()) {
                (Some(x), Some(y)) => x == y,
                _ => false,
            },
        }
    }

    /// Python ordering for numbers, strings and sequences thereof.
    pub fn py_cmp(&self, other: &Value) -> Result<Ordering, RuntimeError> {
        if let (Some(a), Some(b)) = (self.as_f64(), other.as_f64()) {
            return a
                .partial_cmp(&b)
                .ok_or_else(|| RuntimeError::Type("cannot order NaN".into()));
        }
        let seq = |v: &Value| match v {
            Value::List(l) => Some(l.borrow().clone()),
            Value::Pair(p) => Some(vec![p.0.clone(), p.1.clone()]),
            _ => None,
        };
        match (self, other) {
            (Value::Str(a), Value::Str(b)) => Ok(a.cmp(b)),
            _ => match (seq(self), seq(other)) {
                (Some(a), Some(b)) => {
                    for (x, y) in a.iter().zip(&b) {
                        let o = x.py_cmp(y)?;
                        if o != Ordering::Equal {
                            return Ok(o);
                        }
                    }
                    Ok(a.len().cmp(&b.len()))
                }
                _ => Err(RuntimeError::Type(format!(
                    "'<' not supported between {} and {}",
                    self.type_name(),
                    other.type_name()
                ))),
            },
        }
    }
}

fn fmt_float(f: f64) -> String {
    if f.is_finite() && f == f.trunc() && f.abs() < 1e16 {
        format!("{f:.1}")
    } else {
        format!("{f}")
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::None => f.write_str("None"),
            Value::Bool(true) => f.write_str("True"),
            Value::Bool(false) => f.write_str("False"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => f.write_str(&fmt_float(*x)),
            Value::Str(s) => write!(f, "'{s}'"),
            Value::List(l) => {
                f.write_str("[")?;
                for (i, v) in l.borrow().iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            Value::Pair(p) => write!(f, "({}, {})", p.0, p.1),
            Value::Dict(d) => {
                f.write_str("{")?;
                for (i, (k, v)) in d.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "'{k}': {v}")?;
                }
                f.write_str("}")
            }
            Value::Patch(p) => write!(f, "<patch #{}>", p.0),
            Value::Image => f.write_str("<image>"),
            Value::Builtin(n) => write!(f, "<builtin {n}>"),
            Value::Method(_, n) => write!(f, "<method {n}>"),
            Value::Lambda(_) => f.write_str("<lambda>"),
        }
    }
}
