//! Syntax tree for navigation programs.

use std::fmt;

/// 1-based source position.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub fn new(line: u32, column: u32) -> Self {
        Self { line, column }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A parsed `execute_command` definition.
#[derive(Debug, Clone, PartialEq)]
pub struct NavAst {
    pub param: String,
    pub param_annotation: Option<Expr>,
    pub return_annotation: Option<Expr>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Name(String),
    Pair(String, String),
}

impl Target {
    pub fn names(&self) -> Vec<&str> {
        match self {
            Target::Name(n) => vec![n.as_str()],
            Target::Pair(a, b) => vec![a.as_str(), b.as_str()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Assign {
        target: Target,
        value: Expr,
    },
    AugAssign {
        target: String,
        op: BinOp,
        value: Expr,
    },
    Expr(Expr),
    If {
        test: Expr,
        body: Vec<Stmt>,
        orelse: Vec<Stmt>,
    },
    For {
        target: Target,
        iter: Expr,
        body: Vec<Stmt>,
    },
    /// `return` with no value is the early-return form.
    Return(Option<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Keyword {
    pub name: String,
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Name(String),
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
    None,
    Attribute {
        value: Box<Expr>,
        attr: String,
    },
    Call {
        func: Box<Expr>,
        args: Vec<Expr>,
        keywords: Vec<Keyword>,
    },
    Subscript {
        value: Box<Expr>,
        index: Box<Expr>,
    },
    Compare {
        left: Box<Expr>,
        ops: Vec<CmpOp>,
        comparators: Vec<Expr>,
    },
    BoolOp {
        op: BoolOp,
        values: Vec<Expr>,
    },
    Not(Box<Expr>),
    Neg(Box<Expr>),
    BinOp {
        left: Box<Expr>,
        op: BinOp,
        right: Box<Expr>,
    },
    List(Vec<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    Dict(Vec<(String, Expr)>),
    Lambda {
        param: String,
        body: Box<Expr>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    FloorDiv,
    Mod,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::FloorDiv => "//",
            BinOp::Mod => "%",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    NotEq,
    Lt,
    LtE,
    Gt,
    GtE,
    In,
    NotIn,
    Is,
    IsNot,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::NotEq => "!=",
            CmpOp::Lt => "<",
            CmpOp::LtE => "<=",
            CmpOp::Gt => ">",
            CmpOp::GtE => ">=",
            CmpOp::In => "in",
            CmpOp::NotIn => "not in",
            CmpOp::Is => "is",
            CmpOp::IsNot => "is not",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Self { kind, span }
    }

    /// Direct children in source order.
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Name(_)
            | ExprKind::Int(_)
            | ExprKind::Float(_)
            | ExprKind::Str(_)
            | ExprKind::Bool(_)
            | ExprKind::None => vec![],
            ExprKind::Attribute { value, .. } => vec![value],
            ExprKind::Call {
                func,
                args,
                keywords,
            } => {
                let mut out: Vec<&Expr> = vec![func];
                out.extend(args.iter());
                out.extend(keywords.iter().map(|k| &k.value));
                out
            }
            ExprKind::Subscript { value, index } => vec![value, index],
            ExprKind::Compare {
                left, comparators, ..
            } => {
                let mut out: Vec<&Expr> = vec![left];
                out.extend(comparators.iter());
                out
            }
            ExprKind::BoolOp { values, .. } => values.iter().collect(),
            ExprKind::Not(e) | ExprKind::Neg(e) => vec![e],
            ExprKind::BinOp { left, right, .. } => vec![left, right],
            ExprKind::List(items) => items.iter().collect(),
            ExprKind::Pair(a, b) => vec![a, b],
            ExprKind::Dict(entries) => entries.iter().map(|(_, v)| v).collect(),
            ExprKind::Lambda { body, .. } => vec![body],
        }
    }
}

/// Resets every span to the default, for structural comparison.
pub fn strip_spans(ast: &NavAst) -> NavAst {
    fn expr(e: &Expr) -> Expr {
        let kind = match &e.kind {
            ExprKind::Attribute { value, attr } => ExprKind::Attribute {
                value: Box::new(expr(value)),
                attr: attr.clone(),
            },
            ExprKind::Call {
                func,
                args,
                keywords,
            } => ExprKind::Call {
                func: Box::new(expr(func)),
                args: args.iter().map(expr).collect(),
                keywords: keywords
                    .iter()
                    .map(|k| Keyword {
                        name: k.name.clone(),
                        value: expr(&k.value),
                    })
                    .collect(),
            },
            ExprKind::Subscript { value, index } => ExprKind::Subscript {
                value: Box::new(expr(value)),
                index: Box::new(expr(index)),
            },
            ExprKind::Compare {
                left,
                ops,
                comparators,
            } => ExprKind::Compare {
                left: Box::new(expr(left)),
                ops: ops.clone(),
                comparators: comparators.iter().map(expr).collect(),
            },
            ExprKind::BoolOp { op, values } => ExprKind::BoolOp {
                op: *op,
                values: values.iter().map(expr).collect(),
            },
            ExprKind::Not(v) => ExprKind::Not(Box::new(expr(v))),
            ExprKind::Neg(v) => ExprKind::Neg(Box::new(expr(v))),
            ExprKind::BinOp { left, op, right } => ExprKind::BinOp {
                left: Box::new(expr(left)),
                op: *op,
                right: Box::new(expr(right)),
            },
            ExprKind::List(items) => ExprKind::List(items.iter().map(expr).collect()),
            ExprKind::Pair(a, b) => ExprKind::Pair(Box::new(expr(a)), Box::new(expr(b))),
            ExprKind::Dict(entries) => {
                ExprKind::Dict(entries.iter().map(|(k, v)| (k.clone(), expr(v))).collect())
            }
            ExprKind::Lambda { param, body } => ExprKind::Lambda {
                param: param.clone(),
                body: Box::new(expr(body)),
            },
            other => other.clone(),
        };
        Expr::new(kind, Span::default())
    }
    fn stmt(s: &Stmt) -> Stmt {
        let kind = match &s.kind {
            StmtKind::Assign { target, value } => StmtKind::Assign {
                target: target.clone(),
                value: expr(value),
            },
            StmtKind::AugAssign { target, op, value } => StmtKind::AugAssign {
                target: target.clone(),
                op: *op,
                value: expr(value),
            },
            StmtKind::Expr(e) => StmtKind::Expr(expr(e)),
            StmtKind::If { test, body, orelse } => StmtKind::If {
                test: expr(test),
                body: body.iter().map(stmt).collect(),
                orelse: orelse.iter().map(stmt).collect(),
            },
            StmtKind::For { target, iter, body } => StmtKind::For {
                target: target.clone(),
                iter: expr(iter),
                body: body.iter().map(stmt).collect(),
            },
            StmtKind::Return(v) => StmtKind::Return(v.as_ref().map(expr)),
        };
        Stmt {
            kind,
            span: Span::default(),
        }
    }
    NavAst {
        param: ast.param.clone(),
        param_annotation: ast.param_annotation.as_ref().map(expr),
        return_annotation: ast.return_annotation.as_ref().map(expr),
        body: ast.body.iter().map(stmt).collect(),
        span: Span::default(),
    }
}
