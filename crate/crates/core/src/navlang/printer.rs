//! Canonical source rendering of a [`NavAst`].

use super::ast::*;
use super::parser::ENTRY_POINT;

// Binding strength, loosest first.
const LAMBDA: u8 = 0;
const OR: u8 = 1;
const AND: u8 = 2;
const NOT: u8 = 3;
const CMP: u8 = 4;
const ARITH: u8 = 5;
const TERM: u8 = 6;
const UNARY: u8 = 7;
const POSTFIX: u8 = 8;

pub fn print_program(ast: &NavAst) -> String {
    let mut out = format!("def {ENTRY_POINT}({}", ast.param);
    if let Some(a) = &ast.param_annotation {
        out.push_str(": ");
        out.push_str(&print_expr(a));
    }
    out.push(')');
    if let Some(r) = &ast.return_annotation {
        out.push_str(" -> ");
        out.push_str(&print_expr(r));
    }
    out.push_str(":\n");
    block(&mut out, &ast.body, 1);
    out
}

fn block(out: &mut String, body: &[Stmt], depth: usize) {
    for s in body {
        stmt(out, s, depth);
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn target(t: &Target) -> String {
    match t {
        Target::Name(n) => n.clone(),
        Target::Pair(a, b) => format!("{a}, {b}"),
    }
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    indent(out, depth);
    match &s.kind {
        StmtKind::Assign { target: t, value } => {
            out.push_str(&format!("{} = {}\n", target(t), print_expr(value)));
        }
        StmtKind::AugAssign { target, op, value } => {
            out.push_str(&format!("{target} {}= {}\n", op.symbol(), print_expr(value)));
        }
        StmtKind::Expr(e) => {
            out.push_str(&print_expr(e));
            out.push('\n');
        }
        StmtKind::Return(None) => out.push_str("return\n"),
        StmtKind::Return(Some(e)) => out.push_str(&format!("return {}\n", print_expr(e))),
        StmtKind::For { target: t, iter, body } => {
            out.push_str(&format!("for {} in {}:\n", target(t), print_expr(iter)));
            block(out, body, depth + 1);
        }
        StmtKind::If { test, body, orelse } => {
            out.push_str(&format!("if {}:\n", print_expr(test)));
            block(out, body, depth + 1);
            if !orelse.is_empty() {
                indent(out, depth);
                out.push_str("else:\n");
                block(out, orelse, depth + 1);
            }
        }
    }
}

pub fn print_expr(e: &Expr) -> String {
    expr_at(e, LAMBDA)
}

fn level(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Lambda { .. } => LAMBDA,
        ExprKind::BoolOp { op: BoolOp::Or, .. } => OR,
        ExprKind::BoolOp { op: BoolOp::And, .. } => AND,
        ExprKind::Not(_) => NOT,
        ExprKind::Compare { .. } => CMP,
        ExprKind::BinOp { op, .. } if op.precedence() == 1 => ARITH,
        ExprKind::BinOp { .. } => TERM,
        ExprKind::Neg(_) => UNARY,
        _ => POSTFIX,
    }
}

fn expr_at(e: &Expr, min: u8) -> String {
    let s = render(e);
    if level(e) < min {
        format!("({s})")
    } else {
        s
    }
}

fn render(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Name(n) => n.clone(),
        ExprKind::Int(i) => i.to_string(),
        ExprKind::Float(f) => format!("{f:?}"),
        ExprKind::Str(s) => quote(s),
        ExprKind::Bool(true) => "True".into(),
        ExprKind::Bool(false) => "False".into(),
        ExprKind::None => "None".into(),
        ExprKind::Attribute { value, attr } => {
            let base = match value.kind {
                ExprKind::Int(_) | ExprKind::Float(_) => format!("({})", render(value)),
                _ => expr_at(value, POSTFIX),
            };
            format!("{base}.{attr}")
        }
        ExprKind::Call {
            func,
            args,
            keywords,
        } => {
            let mut parts: Vec<String> = args.iter().map(print_expr).collect();
            parts.extend(
                keywords
                    .iter()
                    .map(|k| format!("{}={}", k.name, print_expr(&k.value))),
            );
            format!("{}({})", expr_at(func, POSTFIX), parts.join(", "))
        }
        ExprKind::Subscript { value, index } => {
            format!("{}[{}]", expr_at(value, POSTFIX), print_expr(index))
        }
        ExprKind::Compare {
            left,
            ops,
            comparators,
        } => {
            let mut s = expr_at(left, CMP + 1);
            for (op, c) in ops.iter().zip(comparators) {
                s.push_str(&format!(" {} {}", op.symbol(), expr_at(c, CMP + 1)));
            }
            s
        }
        ExprKind::BoolOp { op, values } => {
            let (word, lvl) = match op {
                BoolOp::And => ("and", AND),
                BoolOp::Or => ("or", OR),
            };
            values
                .iter()
                .map(|v| expr_at(v, lvl + 1))
                .collect::<Vec<_>>()
                .join(&format!(" {word} "))
        }
        ExprKind::Not(v) => format!("not {}", expr_at(v, NOT)),
        ExprKind::Neg(v) => format!("-{}", expr_at(v, UNARY)),
        ExprKind::BinOp { left, op, right } => {
            let lvl = level(e);
            format!(
                "{} {} {}",
                expr_at(left, lvl),
                op.symbol(),
                expr_at(right, lvl + 1)
            )
        }
        ExprKind::List(items) => format!(
            "[{}]",
            items.iter().map(print_expr).collect::<Vec<_>>().join(", ")
        ),
        ExprKind::Pair(a, b) => format!("({}, {})", print_expr(a), print_expr(b)),
        ExprKind::Dict(entries) => format!(
            "{{{}}}",
            entries
                .iter()
                .map(|(k, v)| format!("{}: {}", quote(k), print_expr(v)))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        ExprKind::Lambda { param, body } => format!("lambda {param}: {}", print_expr(body)),
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\'' => out.push_str("\\'"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}
