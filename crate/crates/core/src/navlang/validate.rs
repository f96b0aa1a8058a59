//! Static allowlist checks over a parsed program.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::ast::*;

/// Names a program may reference without assigning them first.
pub const GLOBAL_ALLOWLIST: &[&str] = &[
    "ImagePatch",
    "best_image_match",
    "distance",
    "bool_to_yesno",
    "coerce_to_numeric",
    "llm_query",
    "navigate_to_object",
    "len",
    "sorted",
    "min",
    "max",
    "abs",
    "enumerate",
    "range",
];

/// Navigation API functions, as opposed to the Python builtins on the allowlist.
pub const API_FUNCTIONS: &[&str] = &[
    "best_image_match",
    "distance",
    "bool_to_yesno",
    "coerce_to_numeric",
    "llm_query",
    "navigate_to_object",
];

pub const PATCH_METHODS: &[&str] = &[
    "find",
    "exists",
    "verify_property",
    "best_text_match",
    "simple_query",
    "compute_depth",
    "crop",
    "overlaps_with",
];

/// In-place sequence methods the interpreter supports.
pub const SEQUENCE_METHODS: &[&str] = &["sort", "append"];

pub const PATCH_ATTRIBUTES: &[&str] = &[
    "left",
    "lower",
    "right",
    "upper",
    "width",
    "height",
    "horizontal_center",
    "vertical_center",
    "frame",
];

/// Keyword arguments accepted per callee.
fn allowed_keywords(callee: &str) -> &'static [&'static str] {
    match callee {
        "sort" | "sorted" | "min" | "max" => &["key", "reverse"],
        "ImagePatch" => &["image", "left", "lower", "right", "upper", "frame"],
        "crop" | "overlaps_with" => &["left", "lower", "right", "upper"],
        "find" | "exists" => &["object_name"],
        "verify_property" => &["object_name", "visual_property"],
        "best_text_match" => &["option_list", "prefix"],
        "simple_query" => &["question"],
        "llm_query" => &["question", "long_answer"],
        "best_image_match" => &["list_patches", "content", "return_index"],
        "distance" => &["patch_a", "patch_b"],
        "bool_to_yesno" => &["bool_answer"],
        "coerce_to_numeric" => &["string"],
        "navigate_to_object" => &["x", "y"],
        _ => &[],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub diagnostics: Vec<Diagnostic>,
    pub api_usage: BTreeSet<String>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Error)
    }
}

pub fn validate(ast: &NavAst) -> ValidationReport {
    let mut locals: HashSet<String> = HashSet::new();
    locals.insert(ast.param.clone());
    collect_locals(&ast.body, &mut locals);

    let mut v = Validator {
        locals,
        lambda_params: Vec::new(),
        diagnostics: Vec::new(),
        api_usage: BTreeSet::new(),
    };
    for name in GLOBAL_ALLOWLIST {
        if v.locals.contains(*name) {
            v.error(
                format!("assignment shadows allowlisted name: {name}"),
                ast.span,
            );
        }
    }
    v.block(&ast.body);
    if !contains_return(&ast.body) {
        v.warn("program never returns a navigation result".into(), ast.span);
    }
    if let Some(r) = &ast.return_annotation {
        if !matches!(&r.kind, ExprKind::Name(n) if n == "dict" || n == "Dict") {
            v.warn(
                "return annotation is not a mapping; bare patch results are normalized at runtime"
                    .into(),
                r.span,
            );
        }
    }
    v.diagnostics.sort_by_key(|d| (d.line, d.column));
    let ok = !v.diagnostics.iter().any(|d| d.severity == Severity::Error);
    ValidationReport {
        ok,
        diagnostics: v.diagnostics,
        api_usage: v.api_usage,
    }
}

fn collect_locals(body: &[Stmt], out: &mut HashSet<String>) {
    for s in body {
        match &s.kind {
            StmtKind::Assign { target, .. } | StmtKind::For { target, .. } => {
                out.extend(target.names().into_iter().map(String::from));
            }
            StmtKind::AugAssign { target, .. } => {
                out.insert(target.clone());
            }
            _ => {}
        }
        match &s.kind {
            StmtKind::If { body, orelse, .. } => {
                collect_locals(body, out);
                collect_locals(orelse, out);
            }
            StmtKind::For { body, .. } => collect_locals(body, out),
            _ => {}
        }
    }
}

fn contains_return(body: &[Stmt]) -> bool {
    body.iter().any(|s| match &s.kind {
        StmtKind::Return(_) => true,
        StmtKind::If { body, orelse, .. } => contains_return(body) || contains_return(orelse),
        StmtKind::For { body, .. } => contains_return(body),
        _ => false,
    })
}

struct Validator {
    locals: HashSet<String>,
    lambda_params: Vec<String>,
    diagnostics: Vec<Diagnostic>,
    api_usage: BTreeSet<String>,
}

impl Validator {
    fn push(&mut self, severity: Severity, message: String, span: Span) {
        let d = Diagnostic {
            severity,
            message,
            line: span.line,
            column: span.column,
        };
        if !self.diagnostics.contains(&d) {
            self.diagnostics.push(d);
        }
    }

    fn error(&mut self, message: String, span: Span) {
        self.push(Severity::Error, message, span);
    }

    fn warn(&mut self, message: String, span: Span) {
        self.push(Severity::Warning, message, span);
    }

    fn is_local(&self, name: &str) -> bool {
        self.locals.contains(name) || self.lambda_params.iter().any(|p| p == name)
    }

    fn block(&mut self, body: &[Stmt]) {
        for s in body {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Assign { value, .. } => self.expr(value),
            StmtKind::AugAssign { target, value, .. } => {
                self.name_read(target, s.span);
                self.expr(value);
            }
            StmtKind::Expr(e) => self.expr(e),
            StmtKind::If { test, body, orelse } => {
                self.expr(test);
                self.block(body);
                self.block(orelse);
            }
            StmtKind::For { iter, body, .. } => {
                self.expr(iter);
                self.block(body);
            }
            StmtKind::Return(v) => {
                if let Some(e) = v {
                    self.expr(e);
                }
            }
        }
    }

    fn name_read(&mut self, name: &str, span: Span) {
        if self.is_local(name) {
            return;
        }
        if GLOBAL_ALLOWLIST.contains(&name) {
            self.api_usage.insert(name.to_string());
        } else {
            self.error(format!("disallowed global: {name}"), span);
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Name(n) => self.name_read(n, e.span),
            ExprKind::Attribute { value, attr } => {
                if PATCH_ATTRIBUTES.contains(&attr.as_str()) {
                    self.api_usage.insert(attr.clone());
                } else {
                    self.error(format!("disallowed attribute: {attr}"), e.span);
                }
                self.expr(value);
            }
            ExprKind::Call {
                func,
                args,
                keywords,
            } => {
                let callee = match &func.kind {
                    ExprKind::Name(n) => {
                        if self.is_local(n) {
                            self.error(
                                format!("call target is not an API function: {n}"),
                                func.span,
                            );
                        } else {
                            self.name_read(n, func.span);
                        }
                        Some(n.as_str())
                    }
                    ExprKind::Attribute { value, attr } => {
                        if PATCH_METHODS.contains(&attr.as_str())
                            || SEQUENCE_METHODS.contains(&attr.as_str())
                        {
                            self.api_usage.insert(attr.clone());
                        } else {
                            self.error(format!("disallowed method: {attr}"), func.span);
                        }
                        self.expr(value);
                        Some(attr.as_str())
                    }
                    _ => {
                        self.error("call target is not an API function".into(), func.span);
                        self.expr(func);
                        None
                    }
                };
                for a in args {
                    self.expr(a);
                }
                for k in keywords {
                    let allowed = callee.map(allowed_keywords).unwrap_or(&[]);
                    if !allowed.contains(&k.name.as_str()) {
                        self.error(
                            format!(
                                "disallowed keyword argument: {}={}",
                                k.name,
                                callee.unwrap_or("?")
                            ),
                            k.value.span,
                        );
                    }
                    match &k.value.kind {
                        ExprKind::Lambda { param, body } if k.name == "key" => {
                            self.key_function(param, body)
                        }
                        _ => self.expr(&k.value),
                    }
                }
            }
            ExprKind::Lambda { param, body } => {
                self.error("lambda is only allowed as a key= function".into(), e.span);
                self.key_function(param, body);
            }
            _ => {
                for c in e.children() {
                    self.expr(c);
                }
            }
        }
    }

    fn key_function(&mut self, param: &str, body: &Expr) {
        self.lambda_params.push(param.to_string());
        self.expr(body);
        self.lambda_params.pop();
    }
}

/// Pre-order listing of navigation API and method calls; Python builtins
/// and the `ImagePatch` constructor are omitted.
pub fn summarize_api_usage(ast: &NavAst) -> Vec<String> {
    fn expr(e: &Expr, out: &mut Vec<String>) {
        if let ExprKind::Call { func, .. } = &e.kind {
            match &func.kind {
                ExprKind::Name(n) if API_FUNCTIONS.contains(&n.as_str()) => out.push(n.clone()),
                ExprKind::Attribute { attr, .. } => out.push(attr.clone()),
                _ => {}
            }
        }
        for c in e.children() {
            expr(c, out);
        }
    }
    fn block(body: &[Stmt], out: &mut Vec<String>) {
        for s in body {
            match &s.kind {
                StmtKind::Assign { value, .. } | StmtKind::AugAssign { value, .. } => {
                    expr(value, out)
                }
                StmtKind::Expr(e) => expr(e, out),
                StmtKind::Return(Some(e)) => expr(e, out),
                StmtKind::Return(None) => {}
                StmtKind::If { test, body, orelse } => {
                    expr(test, out);
                    block(body, out);
                    block(orelse, out);
                }
                StmtKind::For { iter, body, .. } => {
                    expr(iter, out);
                    block(body, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    block(&ast.body, &mut out);
    out
}
