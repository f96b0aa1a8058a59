use super::ast::Span;
use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Name(String),
    Int(i64),
    Float(f64),
    Str(String),
    /// Operators and delimiters, e.g. `(`, `//`, `==`, `->`.
    Op(&'static str),
    Newline,
    Indent,
    Dedent,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const OPS: &[&str] = &[
    "//=", "**", "//", "==", "!=", "<=", ">=", "->", "+=", "-=", "*=", "/=", "%=", "(", ")", "[",
    "]", "{", "}", ",", ":", ".", "+", "-", "*", "/", "%", "<", ">", "=", ";", "@", "&", "|",
    "^", "~",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    Lexer::new(src).run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    depth: usize,
    indents: Vec<usize>,
    out: Vec<Token>,
}

impl Lexer {
    fn new(src: &str) -> Self {
        Self {
            chars: src.replace("\r\n", "\n").chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            depth: 0,
            indents: vec![0],
            out: Vec::new(),
        }
    }

    fn peek(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span::new(self.line, self.col)
    }

    fn push(&mut self, tok: Tok, span: Span) {
        self.out.push(Token { tok, span });
    }

    fn syntax(&self, msg: impl Into<String>, span: Span) -> ParseError {
        ParseError::Syntax {
            message: msg.into(),
            span,
        }
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        let mut at_line_start = true;
        while self.pos < self.chars.len() {
            if at_line_start && self.depth == 0 {
                if self.handle_indent()? {
                    continue;
                }
                at_line_start = false;
            }
            let c = self.peek(0).unwrap();
            let span = self.span();
            match c {
                '\n' => {
                    self.bump();
                    if self.depth == 0 {
                        if !matches!(
                            self.out.last().map(|t| &t.tok),
                            None | Some(Tok::Newline) | Some(Tok::Indent) | Some(Tok::Dedent)
                        ) {
                            self.push(Tok::Newline, span);
                        }
                        at_line_start = true;
                    }
                }
                ' ' | '\t' => {
                    self.bump();
                }
                '#' => {
                    while let Some(c) = self.peek(0) {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                '\\' if self.peek(1) == Some('\n') => {
                    self.bump();
                    self.bump();
                }
                '"' | '\'' => self.string(c, span)?,
                c if c.is_ascii_digit() || (c == '.' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) => {
                    self.number(span)?
                }
                c if c.is_alphabetic() || c == '_' => {
                    let mut s = String::new();
                    while let Some(c) = self.peek(0) {
                        if c.is_alphanumeric() || c == '_' {
                            s.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.push(Tok::Name(s), span);
                }
                _ => {
                    let rest: String = self.chars[self.pos..].iter().take(3).collect();
                    let op = OPS
                        .iter()
                        .find(|op| rest.starts_with(**op))
                        .ok_or_else(|| self.syntax(format!("unexpected character '{c}'"), span))?;
                    for _ in 0..op.chars().count() {
                        self.bump();
                    }
                    match *op {
                        "(" | "[" | "{" => self.depth += 1,
                        ")" | "]" | "}" => {
                            if self.depth == 0 {
                                return Err(self.syntax(format!("unmatched '{op}'"), span));
                            }
                            self.depth -= 1;
                        }
                        _ => {}
                    }
                    self.push(Tok::Op(op), span);
                }
            }
        }
        let span = self.span();
        if self.depth > 0 {
            return Err(self.syntax("unexpected end of input inside brackets", span));
        }
        if !matches!(
            self.out.last().map(|t| &t.tok),
            None | Some(Tok::Newline) | Some(Tok::Dedent)
        ) {
            self.push(Tok::Newline, span);
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(Tok::Dedent, span);
        }
        self.push(Tok::Eof, span);
        Ok(self.out)
    }

    /// Measures leading whitespace; returns true if the line was blank.
    fn handle_indent(&mut self) -> Result<bool, ParseError> {
        let mut width = 0usize;
        while let Some(c) = self.peek(0) {
            match c {
                ' ' => width += 1,
                '\t' => width = (width / 8 + 1) * 8,
                _ => break,
            }
            self.bump();
        }
        if matches!(self.peek(0), None | Some('\n') | Some('#')) {
            self.skip_blank_line();
            return Ok(true);
        }
        let span = self.span();
        let current = *self.indents.last().unwrap();
        if width > current {
            self.indents.push(width);
            self.push(Tok::Indent, span);
        } else if width < current {
            while *self.indents.last().unwrap() > width {
                self.indents.pop();
                self.push(Tok::Dedent, span);
            }
            if *self.indents.last().unwrap() != width {
                return Err(self.syntax("inconsistent dedent", span));
            }
        }
        Ok(false)
    }

    fn skip_blank_line(&mut self) {
        while let Some(c) = self.peek(0) {
            self.bump();
            if c == '\n' {
                break;
            }
        }
    }

    fn string(&mut self, quote: char, span: Span) -> Result<(), ParseError> {
        let triple = self.peek(1) == Some(quote) && self.peek(2) == Some(quote);
        let n = if triple { 3 } else { 1 };
        for _ in 0..n {
            self.bump();
        }
        let mut s = String::new();
        loop {
            let c = self
                .bump()
                .ok_or_else(|| self.syntax("unterminated string literal", span))?;
            if c == quote {
                if !triple {
                    break;
                }
                if self.peek(0) == Some(quote) && self.peek(1) == Some(quote) {
                    self.bump();
                    self.bump();
                    break;
                }
                s.push(c);
                continue;
            }
            match c {
                '\n' if !triple => return Err(self.syntax("unterminated string literal", span)),
                '\\' => {
                    let e = self
                        .bump()
                        .ok_or_else(|| self.syntax("unterminated string literal", span))?;
                    match e {
                        'n' => s.push('\n'),
                        't' => s.push('\t'),
                        '\\' => s.push('\\'),
                        '\'' => s.push('\''),
                        '"' => s.push('"'),
                        '\n' => {}
                        other => {
                            s.push('\\');
                            s.push(other);
                        }
                    }
                }
                other => s.push(other),
            }
        }
        self.push(Tok::Str(s), span);
        Ok(())
    }

    fn number(&mut self, span: Span) -> Result<(), ParseError> {
        let mut s = String::new();
        let mut is_float = false;
        while let Some(c) = self.peek(0) {
            if c.is_ascii_digit() || c == '_' {
                if c != '_' {
                    s.push(c);
                }
                self.bump();
            } else if c == '.' && !is_float {
                is_float = true;
                s.push(c);
                self.bump();
            } else if (c == 'e' || c == 'E')
                && self
                    .peek(1)
                    .is_some_and(|d| d.is_ascii_digit() || d == '-' || d == '+')
            {
                is_float = true;
                s.push(c);
                self.bump();
                if let Some(sign @ ('+' | '-')) = self.peek(0) {
                    s.push(sign);
                    self.bump();
                }
            } else {
                break;
            }
        }
        if is_float {
            let v: f64 = s
                .parse()
                .map_err(|_| self.syntax(format!("invalid float literal '{s}'"), span))?;
            self.push(Tok::Float(v), span);
        } else {
            let v: i64 = s
                .parse()
                .map_err(|_| self.syntax(format!("integer literal out of range '{s}'"), span))?;
            self.push(Tok::Int(v), span);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn indentation_produces_indent_dedent() {
        let toks = kinds("def f(x):\n    return x\n");
        assert!(toks.contains(&Tok::Indent));
        assert!(toks.contains(&Tok::Dedent));
        assert_eq!(toks.last(), Some(&Tok::Eof));
    }

    #[test]
    fn brackets_join_lines() {
        let toks = kinds("x = [1,\n  2]\n");
        assert_eq!(toks.iter().filter(|t| **t == Tok::Newline).count(), 1);
        assert!(!toks.contains(&Tok::Indent));
    }

    #[test]
    fn floor_div_is_one_token() {
        assert!(kinds("a // 2").contains(&Tok::Op("//")));
    }

    #[test]
    fn comment_and_blank_lines_skipped() {
        let toks = kinds("def f(x):\n\n    # hi\n    return x  # trailing\n");
        assert_eq!(toks.iter().filter(|t| **t == Tok::Indent).count(), 1);
    }

    #[test]
    fn unterminated_string_has_position() {
        match tokenize("x = 'abc\n") {
            Err(ParseError::Syntax { span, .. }) => assert_eq!(span, Span::new(1, 5)),
            other => panic!("{other:?}"),
        }
    }
}
