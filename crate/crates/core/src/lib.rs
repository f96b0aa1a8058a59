//! Language-grounded navigation in a deterministic desk-scale simulator.

pub mod evalharness;
pub mod geom;
pub mod navlang;
pub mod navruntime;
pub mod pipeline;
pub mod planner;
pub mod projection;
pub mod worldsim;

/// Bundled scenes, corpora, fixtures, records and the prompt template.
pub const DATA_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
