use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{NavCommand, ProgramSource};
use crate::navlang::{extract_code, Origin, SourceProgram};

/// Substitution point for the command text in a prompt template.
pub const QUERY_MARKER: &str = "INSERT_QUERY_HERE";

/// The bundled prompt template; contains [`QUERY_MARKER`] exactly once.
pub const DEFAULT_PROMPT_TEMPLATE: &str = include_str!("../../data/prompt_template.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodegenMode {
    Fixture,
    Live,
}

/// Where programs come from. The token itself is never stored here, only
/// the name of the environment variable holding it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodegenConfig {
    pub mode: CodegenMode,
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub token_env: Option<String>,
    #[serde(default)]
    pub model: Option<String>,
    /// Overrides the bundled template.
    #[serde(default)]
    pub prompt_template: Option<PathBuf>,
    pub fixture_dir: PathBuf,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

fn default_timeout() -> u64 {
    60
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodegenError {
    #[error("live mode requires {0}")]
    Config(&'static str),
    #[error("missing fixture {id} ({path})")]
    MissingFixture { id: String, path: String },
    #[error("environment variable {0} is not set")]
    MissingToken(String),
    #[error("cannot read prompt template {path}: {message}")]
    Template { path: String, message: String },
    #[error("prompt template must contain {QUERY_MARKER} exactly once, found {0}")]
    Marker(usize),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("no code extracted")]
    NoCode,
}

impl CodegenConfig {
    pub fn fixtures(dir: impl Into<PathBuf>) -> Self {
        Self {
            mode: CodegenMode::Fixture,
            endpoint: None,
            token_env: None,
            model: None,
            prompt_template: None,
            fixture_dir: dir.into(),
            timeout_secs: default_timeout(),
        }
    }

    pub fn validate(&self) -> Result<(), CodegenError> {
        if self.mode == CodegenMode::Live {
            if self.endpoint.as_deref().is_none_or(str::is_empty) {
                return Err(CodegenError::Config("an endpoint"));
            }
            if self.token_env.as_deref().is_none_or(str::is_empty) {
                return Err(CodegenError::Config("a token environment variable"));
            }
        }
        Ok(())
    }

    pub fn fixture_path(&self, id: &str) -> PathBuf {
        self.fixture_dir.join(format!("{id}.py"))
    }
}

/// Fixture id derived from a command: `<scene>/<words>` with articles
/// dropped, e.g. "Go to the fire extinguisher" in theater gives
/// `theater/go_to_fire_extinguisher`.
pub fn default_fixture_id(scene: &str, text: &str) -> String {
    let words: Vec<String> = text
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_ascii_lowercase)
        .filter(|w| !matches!(w.as_str(), "the" | "a" | "an"))
        .collect();
    format!("{scene}/{}", words.join("_"))
}

pub fn load_template(cfg: &CodegenConfig) -> Result<String, CodegenError> {
    match &cfg.prompt_template {
        None => Ok(DEFAULT_PROMPT_TEMPLATE.to_string()),
        Some(p) => std::fs::read_to_string(p).map_err(|e| CodegenError::Template {
            path: p.display().to_string(),
            message: e.to_string(),
        }),
    }
}

/// Substitutes the command into the template at its single marker.
pub fn assemble_prompt(template: &str, query: &str) -> Result<String, CodegenError> {
    match template.matches(QUERY_MARKER).count() {
        1 => Ok(template.replacen(QUERY_MARKER, query, 1)),
        n => Err(CodegenError::Marker(n)),
    }
}

fn read_fixture(cfg: &CodegenConfig, id: &str) -> Result<SourceProgram, CodegenError> {
    let path = cfg.fixture_path(id);
    let text = std::fs::read_to_string(&path).map_err(|_| CodegenError::MissingFixture {
        id: id.to_string(),
        path: path.display().to_string(),
    })?;
    SourceProgram::new(text, Origin::Fixture).map_err(|_| CodegenError::NoCode)
}

/// Request body for a generic chat-completion endpoint.
pub fn chat_request(model: Option<&str>, prompt: &str) -> serde_json::Value {
    let mut body = serde_json::json!({
        "messages": [{"role": "user", "content": prompt}],
        "temperature": 0,
    });
    if let Some(m) = model {
        body["model"] = m.into();
    }
    body
}

/// Text of the first choice in a chat-completion response.
pub fn response_text(v: &serde_json::Value) -> Option<&str> {
    v.pointer("/choices/0/message/content")
        .or_else(|| v.pointer("/choices/0/text"))
        .and_then(|c| c.as_str())
}

fn live(cfg: &CodegenConfig, cmd: &NavCommand) -> Result<SourceProgram, CodegenError> {
    cfg.validate()?;
    let endpoint = cfg.endpoint.as_deref().unwrap_or_default();
    let var = cfg.token_env.as_deref().unwrap_or_default();
    let token = std::env::var(var).map_err(|_| CodegenError::MissingToken(var.to_string()))?;
    let prompt = assemble_prompt(&load_template(cfg)?, &cmd.text)?;
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(cfg.timeout_secs)))
        .build()
        .into();
    // Transport errors are reported by kind only so no header content leaks.
    let mut resp = agent
        .post(endpoint)
        .header("Authorization", &format!("Bearer {token}"))
        .send_json(chat_request(cfg.model.as_deref(), &prompt))
        .map_err(|e| CodegenError::Transport(transport_reason(&e)))?;
    let body: serde_json::Value = resp
        .body_mut()
        .read_json()
        .map_err(|e| CodegenError::Transport(transport_reason(&e)))?;
    let text = response_text(&body).ok_or(CodegenError::NoCode)?;
    let code = extract_code(text).ok_or(CodegenError::NoCode)?;
    SourceProgram::new(code, Origin::LiveCodegen).map_err(|_| CodegenError::NoCode)
}

fn transport_reason(e: &ureq::Error) -> String {
    match e {
        ureq::Error::StatusCode(c) => format!("HTTP status {c}"),
        ureq::Error::Io(io) => format!("i/o error ({:?})", io.kind()),
        ureq::Error::Timeout(_) => "timed out".into(),
        ureq::Error::HostNotFound => "host not found".into(),
        ureq::Error::ConnectionFailed => "connection failed".into(),
        ureq::Error::Json(_) => "response is not JSON".into(),
        _ => "request failed".into(),
    }
}

/// Fetches the program for a command from its fixture or the live endpoint.
pub fn generate_program(cmd: &NavCommand, cfg: &CodegenConfig) -> Result<SourceProgram, CodegenError> {
    match (&cmd.program_source, cfg.mode) {
        (ProgramSource::Fixture(id), _) => read_fixture(cfg, id),
        (ProgramSource::Default, CodegenMode::Fixture) => read_fixture(cfg, &default_fixture_id(&cmd.scene, &cmd.text)),
        (ProgramSource::Live | ProgramSource::Default, CodegenMode::Live) => live(cfg, cmd),
        (ProgramSource::Live, CodegenMode::Fixture) => Err(CodegenError::Config("mode live")),
    }
}

/// True when `dir/id.py` exists.
pub fn fixture_exists(dir: &Path, id: &str) -> bool {
    dir.join(format!("{id}.py")).is_file()
}
