//! Stage-wise evaluation: per-sentence records, aggregation into summary
//! tables, live simulation runs over a fixture corpus, and report files.

mod aggregate;
mod live;
mod records;
mod report;

use thiserror::Error;

pub use aggregate::{aggregate, AggregateRow, AggregateTable, Grouping, Percent, FOUR_STAGE_COLUMNS, REP_COLUMNS};
pub use live::{
    load_corpus, load_scene_dir, run_live_eval, with_representation, CorpusEntry, EntryResult, InvalidEntry, LiveEval,
};
pub use records::{bundled_records, load_records, parse_records, Category, StageRecord, Stages, BUNDLED_RECORDS};
pub use report::{emit_report, render_report, table_csv, table_text, EvalReport, ReportFormat};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error("record {row} ({scene}: {sentence:?}) passes a stage after failing an earlier one")]
    NonMonotone { row: usize, scene: String, sentence: String },
    #[error("no records to aggregate")]
    Empty,
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("scene error: {0}")]
    Scene(String),
}
