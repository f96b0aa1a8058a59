//! The restricted navigation-program language: lexer, parser, printer and
//! static validator.
//!
//! Programs are a small, closed subset of Python: a single
//! `def execute_command(image):` whose body uses assignments, `if`/`else`,
//! `for` over a sequence, and `return`. Everything else is rejected with an
//! [`ParseError::Unsupported`] naming the construct.

pub mod ast;
mod lexer;
mod parser;
mod printer;
mod validate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ast::{NavAst, Span};
pub use parser::ENTRY_POINT;
pub use printer::{print_expr, print_program};
pub use validate::{
    summarize_api_usage, Diagnostic, Severity, ValidationReport, API_FUNCTIONS, GLOBAL_ALLOWLIST,
    PATCH_ATTRIBUTES, PATCH_METHODS, SEQUENCE_METHODS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {span}: {message}")]
    Syntax { message: String, span: Span },
    #[error("unsupported construct at {span}: {construct}")]
    Unsupported { construct: String, span: Span },
}

impl ParseError {
    pub fn span(&self) -> Span {
        match self {
            ParseError::Syntax { span, .. } | ParseError::Unsupported { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Fixture,
    LiveCodegen,
    Inline,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceProgram {
    pub text: String,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no code extracted")]
pub struct EmptyProgram;

impl SourceProgram {
    pub fn new(text: impl Into<String>, origin: Origin) -> Result<Self, EmptyProgram> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(EmptyProgram);
        }
        Ok(Self { text, origin })
    }
}

/// Pulls program text out of a model response: the first fenced block if
/// there is one, otherwise the first contiguous run of lines starting at a
/// `def`.
pub fn extract_code(response: &str) -> Option<String> {
    let mut in_fence = false;
    let mut fenced = Vec::new();
    for line in response.lines() {
        let trimmed = line.trim_start();
        if trimmed.starts_with("```") {
            if in_fence {
                let code = fenced.join("\n");
                return (!code.trim().is_empty()).then(|| code + "\n");
            }
            in_fence = true;
            continue;
        }
        if in_fence {
            fenced.push(line);
        }
    }
    if in_fence && !fenced.is_empty() {
        let code = fenced.join("\n");
        return (!code.trim().is_empty()).then(|| code + "\n");
    }

    let lines: Vec<&str> = response.lines().collect();
    let start = lines
        .iter()
        .position(|l| l.starts_with("def ") || l.starts_with("import ") || l.starts_with("from "))?;
    let mut block = Vec::new();
    for (i, line) in lines[start..].iter().enumerate() {
        let is_code = i == 0
            || line.trim().is_empty()
            || line.starts_with(' ')
            || line.starts_with('\t')
            || line.starts_with("def ")
            || line.starts_with('#');
        if !is_code {
            break;
        }
        block.push(*line);
    }
    while block.last().is_some_and(|l| l.trim().is_empty()) {
        block.pop();
    }
    Some(block.join("\n") + "\n")
}

pub fn parse_program(src: &SourceProgram) -> Result<NavAst, ParseError> {
    parser::parse(&src.text)
}

/// Parses raw text; convenience for tests and tools.
pub fn parse_str(text: &str) -> Result<NavAst, ParseError> {
    parser::parse(text)
}

pub fn validate_program(ast: &NavAst) -> ValidationReport {
    validate::validate(ast)
}
