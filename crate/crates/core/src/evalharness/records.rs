use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Generic,
    Specific,
    Relational,
    Contextual,
}

impl Category {
    pub const ALL: [Category; 4] = [Category::Generic, Category::Specific, Category::Relational, Category::Contextual];

    pub fn name(self) -> &'static str {
        match self {
            Category::Generic => "Generic",
            Category::Specific => "Specific",
            Category::Relational => "Relational",
            Category::Contextual => "Contextual",
        }
    }

    pub fn parse(s: &str) -> Option<Category> {
        Self::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(s.trim()))
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Stages {
    Four { code: bool, od: bool, wp: bool, path_exec: bool },
    /// Code-stage outcome under representations A and B.
    Rep { a: bool, b: bool },
}

impl Stages {
    /// A failed stage is never followed by a passed one.
    pub fn is_monotone(&self) -> bool {
        match *self {
            Stages::Four { code, od, wp, path_exec } => {
                let s = [code, od, wp, path_exec];
                s.windows(2).all(|w| w[0] || !w[1])
            }
            Stages::Rep { .. } => true,
        }
    }

    pub fn flags(&self) -> Vec<bool> {
        match *self {
            Stages::Four { code, od, wp, path_exec } => vec![code, od, wp, path_exec],
            Stages::Rep { a, b } => vec![a, b],
        }
    }

    pub fn is_four(&self) -> bool {
        matches!(self, Stages::Four { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub scene: String,
    pub category: Category,
    pub sentence: String,
    pub stages: Stages,
}

/// The bundled per-sentence transcription.
pub const BUNDLED_RECORDS: &str = include_str!("../../data/records.json");

pub fn parse_records(text: &str, origin: &str) -> Result<Vec<StageRecord>, EvalError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let records: Vec<StageRecord> = serde_path_to_error::deserialize(de).map_err(|e| EvalError::Parse {
        path: origin.to_string(),
        message: format!("{} at {}", e.inner(), e.path()),
    })?;
    for (row, r) in records.iter().enumerate() {
        if !r.stages.is_monotone() {
            return Err(EvalError::NonMonotone {
                row,
                scene: r.scene.clone(),
                sentence: r.sentence.clone(),
            });
        }
    }
    Ok(records)
}

pub fn load_records(path: impl AsRef<Path>) -> Result<Vec<StageRecord>, EvalError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_records(&text, &path.display().to_string())
}

pub fn bundled_records() -> Vec<StageRecord> {
    parse_records(BUNDLED_RECORDS, "bundled records").expect("bundled records are valid")
}
