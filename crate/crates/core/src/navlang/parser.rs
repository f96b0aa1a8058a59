use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

/// Entry point name every program must define.
pub const ENTRY_POINT: &str = "execute_command";

const RESERVED: &[&str] = &[
    "def", "return", "if", "elif", "else", "for", "in", "not", "and", "or", "is", "lambda",
    "True", "False", "None", "import", "from", "while", "try", "except", "finally", "class",
    "with", "global", "nonlocal", "del", "raise", "assert", "yield", "async", "await", "break",
    "continue", "pass", "as",
];

/// Statement keywords outside the supported node set, with the construct name reported.
const UNSUPPORTED_KEYWORDS: &[(&str, &str)] = &[
    ("import", "import"),
    ("from", "import"),
    ("while", "while loop"),
    ("try", "exception handling"),
    ("except", "exception handling"),
    ("finally", "exception handling"),
    ("raise", "exception handling"),
    ("class", "class definition"),
    ("with", "with statement"),
    ("global", "global declaration"),
    ("nonlocal", "nonlocal declaration"),
    ("del", "del statement"),
    ("assert", "assert statement"),
    ("yield", "generator"),
    ("async", "async"),
    ("await", "async"),
    ("break", "break"),
    ("continue", "continue"),
    ("pass", "pass"),
];

pub fn parse(src: &str) -> Result<NavAst, ParseError> {
    let tokens = tokenize(src)?;
    Parser { tokens, pos: 0 }.program()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

fn unsupported(construct: &str, span: Span) -> ParseError {
    ParseError::Unsupported {
        construct: construct.to_string(),
        span,
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, off: usize) -> &Tok {
        let i = (self.pos + off).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn is_op(&self, op: &str) -> bool {
        matches!(self.peek(), Tok::Op(o) if *o == op)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Name(n) if n == kw)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.is_op(op) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            message: message.into(),
            span: self.span(),
        }
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Name(n) => format!("'{n}'"),
            Tok::Int(i) => format!("'{i}'"),
            Tok::Float(f) => format!("'{f}'"),
            Tok::Str(_) => "string literal".into(),
            Tok::Op(o) => format!("'{o}'"),
            Tok::Newline => "end of line".into(),
            Tok::Indent => "indent".into(),
            Tok::Dedent => "dedent".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect_op(&mut self, op: &str) -> Result<(), ParseError> {
        if self.eat_op(op) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{op}', found {}", self.describe())))
        }
    }

    fn expect_newline(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Newline => {
                self.advance();
                Ok(())
            }
            Tok::Eof | Tok::Dedent => Ok(()),
            Tok::Op(";") => Err(unsupported("multiple statements on one line", self.span())),
            _ => Err(self.syntax(format!("expected end of line, found {}", self.describe()))),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Name(n) if !RESERVED.contains(&n.as_str()) => {
                self.advance();
                Ok(n)
            }
            _ => Err(self.syntax(format!("expected identifier, found {}", self.describe()))),
        }
    }

    fn check_unsupported_keyword(&self) -> Result<(), ParseError> {
        if let Tok::Name(n) = self.peek() {
            if let Some((_, construct)) = UNSUPPORTED_KEYWORDS.iter().find(|(k, _)| k == n) {
                return Err(unsupported(construct, self.span()));
            }
        }
        if self.is_op("@") {
            return Err(unsupported("decorator", self.span()));
        }
        Ok(())
    }

    fn program(&mut self) -> Result<NavAst, ParseError> {
        let mut root = None;
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Newline => {
                    self.advance();
                }
                // module docstrings and other bare literals before the definition
                Tok::Str(_) => {
                    self.advance();
                    self.expect_newline()?;
                }
                _ => {
                    self.check_unsupported_keyword()?;
                    if self.is_kw("def") {
                        if root.is_some() {
                            return Err(unsupported("multiple function definitions", self.span()));
                        }
                        root = Some(self.function()?);
                    } else {
                        return Err(unsupported("top-level statement", self.span()));
                    }
                }
            }
        }
        root.ok_or_else(|| ParseError::Syntax {
            message: format!("missing `def {ENTRY_POINT}(...)`"),
            span: Span::new(1, 1),
        })
    }

    fn function(&mut self) -> Result<NavAst, ParseError> {
        let span = self.span();
        self.advance(); // def
        let name_span = self.span();
        let name = self.ident()?;
        if name != ENTRY_POINT {
            return Err(ParseError::Syntax {
                message: format!("expected function `{ENTRY_POINT}`, found `{name}`"),
                span: name_span,
            });
        }
        self.expect_op("(")?;
        let param = self.ident()?;
        let param_annotation = if self.eat_op(":") {
            Some(self.expr()?)
        } else {
            None
        };
        if self.is_op(",") {
            return Err(ParseError::Syntax {
                message: format!("`{ENTRY_POINT}` takes exactly one parameter"),
                span: self.span(),
            });
        }
        if self.is_op("=") {
            return Err(unsupported("default parameter value", self.span()));
        }
        self.expect_op(")")?;
        let return_annotation = if self.eat_op("->") {
            Some(self.expr()?)
        } else {
            None
        };
        let body = self.suite()?;
        Ok(NavAst {
            param,
            param_annotation,
            return_annotation,
            body,
            span,
        })
    }

    fn suite(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect_op(":")?;
        if matches!(self.peek(), Tok::Newline) {
            self.advance();
            if !matches!(self.peek(), Tok::Indent) {
                return Err(self.syntax("expected an indented block"));
            }
            self.advance();
            let mut body = Vec::new();
            while !matches!(self.peek(), Tok::Dedent | Tok::Eof) {
                if matches!(self.peek(), Tok::Newline) {
                    self.advance();
                    continue;
                }
                body.push(self.statement()?);
            }
            if matches!(self.peek(), Tok::Dedent) {
                self.advance();
            }
            Ok(body)
        } else {
            let stmt = self.simple_statement()?;
            Ok(vec![stmt])
        }
    }

    fn statement(&mut self) -> Result<Stmt, ParseError> {
        self.check_unsupported_keyword()?;
        let span = self.span();
        if self.is_kw("def") {
            return Err(unsupported("nested function definition", span));
        }
        if self.is_kw("if") {
            self.advance();
            return self.if_rest(span);
        }
        if self.is_kw("for") {
            self.advance();
            let target = self.target()?;
            if !self.eat_kw("in") {
                return Err(self.syntax(format!("expected 'in', found {}", self.describe())));
            }
            let iter = self.expr()?;
            let body = self.suite()?;
            if self.is_kw("else") {
                return Err(unsupported("for-else", self.span()));
            }
            return Ok(Stmt {
                kind: StmtKind::For { target, iter, body },
                span,
            });
        }
        if matches!(self.peek(), Tok::Indent) {
            return Err(self.syntax("unexpected indent"));
        }
        self.simple_statement()
    }

    fn if_rest(&mut self, span: Span) -> Result<Stmt, ParseError> {
        let test = self.expr()?;
        let body = self.suite()?;
        let orelse = if self.is_kw("elif") {
            let elif_span = self.span();
            self.advance();
            vec![self.if_rest(elif_span)?]
        } else if self.eat_kw("else") {
            self.suite()?
        } else {
            Vec::new()
        };
        Ok(Stmt {
            kind: StmtKind::If { test, body, orelse },
            span,
        })
    }

    fn target(&mut self) -> Result<Target, ParseError> {
        let paren = self.eat_op("(");
        let first = self.ident()?;
        let t = if self.eat_op(",") {
            let second = self.ident()?;
            if self.is_op(",") {
                return Err(unsupported("unpacking more than two names", self.span()));
            }
            Target::Pair(first, second)
        } else {
            Target::Name(first)
        };
        if paren {
            self.expect_op(")")?;
        }
        Ok(t)
    }

    fn simple_statement(&mut self) -> Result<Stmt, ParseError> {
        self.check_unsupported_keyword()?;
        let span = self.span();
        if self.is_kw("return") {
            self.advance();
            let value = if matches!(self.peek(), Tok::Newline | Tok::Eof | Tok::Dedent) {
                None
            } else {
                Some(self.expr_list()?)
            };
            self.expect_newline()?;
            return Ok(Stmt {
                kind: StmtKind::Return(value),
                span,
            });
        }
        let lhs = self.expr_list()?;
        let aug = match self.peek() {
            Tok::Op("+=") => Some(BinOp::Add),
            Tok::Op("-=") => Some(BinOp::Sub),
            Tok::Op("*=") => Some(BinOp::Mul),
            Tok::Op("/=") => Some(BinOp::Div),
            Tok::Op("//=") => Some(BinOp::FloorDiv),
            Tok::Op("%=") => Some(BinOp::Mod),
            _ => None,
        };
        if let Some(op) = aug {
            let target = match lhs.kind {
                ExprKind::Name(n) => n,
                _ => return Err(unsupported(assign_target_construct(&lhs), lhs.span)),
            };
            self.advance();
            let value = self.expr()?;
            self.expect_newline()?;
            return Ok(Stmt {
                kind: StmtKind::AugAssign { target, op, value },
                span,
            });
        }
        if self.is_op("=") {
            let target = expr_to_target(&lhs)?;
            self.advance();
            let value = self.expr_list()?;
            if self.is_op("=") {
                return Err(unsupported("chained assignment", self.span()));
            }
            self.expect_newline()?;
            return Ok(Stmt {
                kind: StmtKind::Assign { target, value },
                span,
            });
        }
        if self.is_op(":") {
            return Err(unsupported("annotated assignment", self.span()));
        }
        self.expect_newline()?;
        Ok(Stmt {
            kind: StmtKind::Expr(lhs),
            span,
        })
    }

    /// An expression, or two comma-separated expressions forming a pair.
    fn expr_list(&mut self) -> Result<Expr, ParseError> {
        let first = self.expr()?;
        if self.is_op(",") {
            self.advance();
            let second = self.expr()?;
            if self.is_op(",") {
                return Err(unsupported("tuple of more than two elements", self.span()));
            }
            let span = first.span;
            return Ok(Expr::new(
                ExprKind::Pair(Box::new(first), Box::new(second)),
                span,
            ));
        }
        Ok(first)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        if self.is_kw("lambda") {
            let span = self.span();
            self.advance();
            if self.is_op(":") {
                return Err(unsupported("lambda without a parameter", self.span()));
            }
            let param = self.ident()?;
            if self.is_op(",") {
                return Err(unsupported("lambda with more than one parameter", self.span()));
            }
            self.expect_op(":")?;
            let body = self.expr()?;
            return Ok(Expr::new(
                ExprKind::Lambda {
                    param,
                    body: Box::new(body),
                },
                span,
            ));
        }
        let e = self.or_test()?;
        if self.is_kw("if") {
            return Err(unsupported("conditional expression", self.span()));
        }
        Ok(e)
    }

    fn or_test(&mut self) -> Result<Expr, ParseError> {
        let first = self.and_test()?;
        if !self.is_kw("or") {
            return Ok(first);
        }
        let span = first.span;
        let mut values = vec![first];
        while self.eat_kw("or") {
            values.push(self.and_test()?);
        }
        Ok(Expr::new(
            ExprKind::BoolOp {
                op: BoolOp::Or,
                values,
            },
            span,
        ))
    }

    fn and_test(&mut self) -> Result<Expr, ParseError> {
        let first = self.not_test()?;
        if !self.is_kw("and") {
            return Ok(first);
        }
        let span = first.span;
        let mut values = vec![first];
        while self.eat_kw("and") {
            values.push(self.not_test()?);
        }
        Ok(Expr::new(
            ExprKind::BoolOp {
                op: BoolOp::And,
                values,
            },
            span,
        ))
    }

    fn not_test(&mut self) -> Result<Expr, ParseError> {
        if self.is_kw("not") {
            let span = self.span();
            self.advance();
            let inner = self.not_test()?;
            return Ok(Expr::new(ExprKind::Not(Box::new(inner)), span));
        }
        self.comparison()
    }

    fn cmp_op(&mut self) -> Option<CmpOp> {
        let op = match self.peek() {
            Tok::Op("==") => CmpOp::Eq,
            Tok::Op("!=") => CmpOp::NotEq,
            Tok::Op("<") => CmpOp::Lt,
            Tok::Op("<=") => CmpOp::LtE,
            Tok::Op(">") => CmpOp::Gt,
            Tok::Op(">=") => CmpOp::GtE,
            Tok::Name(n) if n == "in" => CmpOp::In,
            Tok::Name(n) if n == "not" && matches!(self.peek_at(1), Tok::Name(m) if m == "in") => {
                self.advance();
                CmpOp::NotIn
            }
            Tok::Name(n) if n == "is" => {
                if matches!(self.peek_at(1), Tok::Name(m) if m == "not") {
                    self.advance();
                    CmpOp::IsNot
                } else {
                    CmpOp::Is
                }
            }
            _ => return None,
        };
        self.advance();
        Some(op)
    }

    fn comparison(&mut self) -> Result<Expr, ParseError> {
        let left = self.arith()?;
        let span = left.span;
        let mut ops = Vec::new();
        let mut comparators = Vec::new();
        while let Some(op) = self.cmp_op() {
            ops.push(op);
            comparators.push(self.arith()?);
        }
        if ops.is_empty() {
            return Ok(left);
        }
        Ok(Expr::new(
            ExprKind::Compare {
                left: Box::new(left),
                ops,
                comparators,
            },
            span,
        ))
    }

    fn arith(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op("+") => BinOp::Add,
                Tok::Op("-") => BinOp::Sub,
                _ => break,
            };
            self.advance();
            let right = self.term()?;
            let span = left.span;
            left = Expr::new(
                ExprKind::BinOp {
                    left: Box::new(left),
                    op,
                    right: Box::new(right),
                },
                span,
            );
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Op("*") => BinOp::Mul,
                Tok::Op("/") => BinOp::Div,
                Tok::Op("//") => BinOp::FloorDiv,
                Tok::Op("%") => BinOp::Mod,
                Tok::Op("@") => return Err(unsupported("matrix multiplication", self.span())),
                _ => break,
            };
            self.advance();
            let right = self.factor()?;
            let span = left.span;
            left = Expr::new(
                ExprKind::BinOp {
                    left: Box::new(left),
                    op,
                    right: Box::new(right),
                },
                span,
            );
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        if self.eat_op("-") {
            let inner = self.factor()?;
            return Ok(Expr::new(ExprKind::Neg(Box::new(inner)), span));
        }
        if self.eat_op("+") {
            return self.factor();
        }
        if self.is_op("~") {
            return Err(unsupported("bitwise operator", span));
        }
        let e = self.postfix()?;
        if self.is_op("**") {
            return Err(unsupported("exponentiation", self.span()));
        }
        if self.is_op("&") || self.is_op("|") || self.is_op("^") {
            return Err(unsupported("bitwise operator", self.span()));
        }
        Ok(e)
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        loop {
            let span = self.span();
            if self.eat_op(".") {
                let attr = self.ident()?;
                let start = e.span;
                e = Expr::new(
                    ExprKind::Attribute {
                        value: Box::new(e),
                        attr,
                    },
                    start,
                );
            } else if self.eat_op("(") {
                let (args, keywords) = self.call_args()?;
                let start = e.span;
                e = Expr::new(
                    ExprKind::Call {
                        func: Box::new(e),
                        args,
                        keywords,
                    },
                    start,
                );
            } else if self.eat_op("[") {
                if self.is_op(":") {
                    return Err(unsupported("slice", span));
                }
                let index = self.expr()?;
                if self.is_op(":") {
                    return Err(unsupported("slice", span));
                }
                if self.is_op(",") {
                    return Err(unsupported("multi-dimensional subscript", span));
                }
                self.expect_op("]")?;
                let start = e.span;
                e = Expr::new(
                    ExprKind::Subscript {
                        value: Box::new(e),
                        index: Box::new(index),
                    },
                    start,
                );
            } else {
                return Ok(e);
            }
        }
    }

    fn call_args(&mut self) -> Result<(Vec<Expr>, Vec<Keyword>), ParseError> {
        let mut args = Vec::new();
        let mut keywords: Vec<Keyword> = Vec::new();
        while !self.is_op(")") {
            if self.is_op("*") || self.is_op("**") {
                return Err(unsupported("star arguments", self.span()));
            }
            let is_keyword = matches!(self.peek(), Tok::Name(n) if !RESERVED.contains(&n.as_str()))
                && matches!(self.peek_at(1), Tok::Op("="));
            if is_keyword {
                let name = self.ident()?;
                self.advance(); // =
                let value = self.expr()?;
                keywords.push(Keyword { name, value });
            } else {
                if !keywords.is_empty() {
                    return Err(self.syntax("positional argument follows keyword argument"));
                }
                let arg = self.expr()?;
                if self.is_kw("for") {
                    return Err(unsupported("comprehension", self.span()));
                }
                args.push(arg);
            }
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        Ok((args, keywords))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(i) => {
                self.advance();
                Ok(Expr::new(ExprKind::Int(i), span))
            }
            Tok::Float(f) => {
                self.advance();
                Ok(Expr::new(ExprKind::Float(f), span))
            }
            Tok::Str(s) => {
                self.advance();
                let mut s = s;
                // implicit concatenation of adjacent literals
                while let Tok::Str(more) = self.peek().clone() {
                    self.advance();
                    s.push_str(&more);
                }
                Ok(Expr::new(ExprKind::Str(s), span))
            }
            Tok::Name(n) => match n.as_str() {
                "True" => {
                    self.advance();
                    Ok(Expr::new(ExprKind::Bool(true), span))
                }
                "False" => {
                    self.advance();
                    Ok(Expr::new(ExprKind::Bool(false), span))
                }
                "None" => {
                    self.advance();
                    Ok(Expr::new(ExprKind::None, span))
                }
                "lambda" => Err(unsupported("lambda outside an argument position", span)),
                "yield" => Err(unsupported("generator", span)),
                "await" => Err(unsupported("async", span)),
                _ => {
                    let name = self.ident()?;
                    Ok(Expr::new(ExprKind::Name(name), span))
                }
            },
            Tok::Op("(") => {
                self.advance();
                if self.is_op(")") {
                    return Err(unsupported("empty tuple", span));
                }
                let first = self.expr()?;
                if self.is_kw("for") {
                    return Err(unsupported("comprehension", self.span()));
                }
                if self.eat_op(",") {
                    if self.is_op(")") {
                        return Err(unsupported("single-element tuple", span));
                    }
                    let second = self.expr()?;
                    if self.is_op(",") {
                        return Err(unsupported("tuple of more than two elements", self.span()));
                    }
                    self.expect_op(")")?;
                    return Ok(Expr::new(
                        ExprKind::Pair(Box::new(first), Box::new(second)),
                        span,
                    ));
                }
                self.expect_op(")")?;
                Ok(first)
            }
            Tok::Op("[") => {
                self.advance();
                let mut items = Vec::new();
                while !self.is_op("]") {
                    items.push(self.expr()?);
                    if self.is_kw("for") {
                        return Err(unsupported("comprehension", self.span()));
                    }
                    if !self.eat_op(",") {
                        break;
                    }
                }
                self.expect_op("]")?;
                Ok(Expr::new(ExprKind::List(items), span))
            }
            Tok::Op("{") => {
                self.advance();
                let mut entries = Vec::new();
                while !self.is_op("}") {
                    let key_span = self.span();
                    let key = match self.peek().clone() {
                        Tok::Str(s) => {
                            self.advance();
                            s
                        }
                        _ => {
                            // distinguish sets from non-string keys for a clearer message
                            let _ = self.expr()?;
                            if self.is_op(":") {
                                return Err(unsupported("non-string mapping key", key_span));
                            }
                            return Err(unsupported("set literal", span));
                        }
                    };
                    if !self.is_op(":") {
                        return Err(unsupported("set literal", span));
                    }
                    self.advance();
                    let value = self.expr()?;
                    if self.is_kw("for") {
                        return Err(unsupported("comprehension", self.span()));
                    }
                    entries.push((key, value));
                    if !self.eat_op(",") {
                        break;
                    }
                }
                self.expect_op("}")?;
                Ok(Expr::new(ExprKind::Dict(entries), span))
            }
            _ => Err(self.syntax(format!("unexpected {}", self.describe()))),
        }
    }
}

fn assign_target_construct(e: &Expr) -> &'static str {
    match e.kind {
        ExprKind::Attribute { .. } => "attribute assignment",
        ExprKind::Subscript { .. } => "subscript assignment",
        _ => "assignment to a non-name target",
    }
}

fn expr_to_target(e: &Expr) -> Result<Target, ParseError> {
    match &e.kind {
        ExprKind::Name(n) => Ok(Target::Name(n.clone())),
        ExprKind::Pair(a, b) => match (&a.kind, &b.kind) {
            (ExprKind::Name(x), ExprKind::Name(y)) => Ok(Target::Pair(x.clone(), y.clone())),
            _ => Err(unsupported("nested unpacking", e.span)),
        },
        _ => Err(unsupported(assign_target_construct(e), e.span)),
    }
}
