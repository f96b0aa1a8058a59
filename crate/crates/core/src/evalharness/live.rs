use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::aggregate::{aggregate, AggregateTable, Grouping};
use super::records::{Category, StageRecord, Stages};
use super::EvalError;
use crate::pipeline::{fixture_exists, run_command, CodegenMode, NavCommand, PipelineConfig, ProgramSource, StageOutcomes};
use crate::projection::Mode;
use crate::worldsim::{load_scene, World};

fn mode_a() -> Mode {
    Mode::A
}

/// A simulation corpus entry: a sentence with its fixture program and the
/// object it refers to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub id: String,
    pub scene: String,
    pub category: Category,
    pub sentence: String,
    /// Fixture id relative to the fixture directory, without `.py`.
    pub fixture: String,
    pub target: String,
    #[serde(default = "mode_a")]
    pub representation: Mode,
}

impl CorpusEntry {
    pub fn command(&self) -> NavCommand {
        NavCommand {
            text: self.sentence.clone(),
            scene: self.scene.clone(),
            category: Some(self.category),
            representation: self.representation,
            program_source: ProgramSource::Fixture(self.fixture.clone()),
            target: Some(self.target.clone()),
        }
    }
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<CorpusEntry>, EvalError> {
    let path = path.as_ref();
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: origin.clone(),
        source,
    })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| EvalError::Parse {
        path: origin,
        message: format!("{} at {}", e.inner(), e.path()),
    })
}

/// Loads every `*.json` scene in `dir`, keyed by scene name.
pub fn load_scene_dir(dir: impl AsRef<Path>) -> Result<BTreeMap<String, World>, EvalError> {
    let dir = dir.as_ref();
    let entries = std::fs::read_dir(dir).map_err(|source| EvalError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut paths: Vec<_> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    let mut out = BTreeMap::new();
    for p in paths {
        let scene = load_scene(&p).map_err(|e| EvalError::Scene(e.to_string()))?;
        out.insert(scene.name.clone(), World::new(scene));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvalidEntry {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryResult {
    pub id: String,
    pub representation: Mode,
    pub record: StageRecord,
    pub stages: StageOutcomes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiveEval {
    /// Corpus order.
    pub results: Vec<EntryResult>,
    /// Entries excluded from aggregation.
    pub invalid: Vec<InvalidEntry>,
    /// By category; `None` when every entry was invalid.
    pub table: Option<AggregateTable>,
}

impl LiveEval {
    pub fn records(&self) -> Vec<StageRecord> {
        self.results.iter().map(|r| r.record.clone()).collect()
    }

    /// Entries that passed the detection stage.
    pub fn od_passes(&self) -> usize {
        self.results.iter().filter(|r| r.stages.od.pass).count()
    }
}

fn check_entry(e: &CorpusEntry, scenes: &BTreeMap<String, World>, cfg: &PipelineConfig) -> Result<(), String> {
    let world = scenes.get(&e.scene).ok_or_else(|| format!("unknown scene {}", e.scene))?;
    if world.scene.object(&e.target).is_none() {
        return Err(format!("target {} is not annotated in scene {}", e.target, e.scene));
    }
    if cfg.codegen.mode == CodegenMode::Fixture && !fixture_exists(&cfg.codegen.fixture_dir, &e.fixture) {
        return Err(format!("missing fixture {}", e.fixture));
    }
    Ok(())
}

/// Runs every valid entry from its scene's start pose, in parallel, each
/// against its own copy of the world.
pub fn run_live_eval(
    corpus: &[CorpusEntry],
    scenes: &BTreeMap<String, World>,
    cfg: &PipelineConfig,
) -> Result<LiveEval, EvalError> {
    if corpus.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let checked: Vec<Result<(), String>> = corpus.iter().map(|e| check_entry(e, scenes, cfg)).collect();
    let invalid = corpus
        .iter()
        .zip(&checked)
        .filter_map(|(e, c)| {
            c.as_ref().err().map(|reason| InvalidEntry {
                id: e.id.clone(),
                reason: reason.clone(),
            })
        })
        .collect();
    let valid: Vec<&CorpusEntry> = corpus.iter().zip(&checked).filter(|(_, c)| c.is_ok()).map(|(e, _)| e).collect();
    let results: Vec<EntryResult> = valid
        .par_iter()
        .map(|e| {
            let world = scenes[&e.scene].clone();
            let report = run_command(&e.command(), &world, cfg);
            let [code, od, wp, path_exec] = report.stages.flags();
            EntryResult {
                id: e.id.clone(),
                representation: e.representation,
                record: StageRecord {
                    scene: e.scene.clone(),
                    category: e.category,
                    sentence: e.sentence.clone(),
                    stages: Stages::Four { code, od, wp, path_exec },
                },
                stages: report.stages,
            }
        })
        .collect();
    let records: Vec<StageRecord> = results.iter().map(|r| r.record.clone()).collect();
    let table = if records.is_empty() {
        None
    } else {
        Some(aggregate(&records, Grouping::Category)?)
    };
    Ok(LiveEval { results, invalid, table })
}

/// The same corpus with every entry switched to `mode`.
pub fn with_representation(corpus: &[CorpusEntry], mode: Mode) -> Vec<CorpusEntry> {
    corpus
        .iter()
        .map(|e| CorpusEntry {
            representation: mode,
            ..e.clone()
        })
        .collect()
}
