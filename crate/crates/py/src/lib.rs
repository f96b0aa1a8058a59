//! Python bindings for the navigation pipeline.
//!
//! Structured results cross the boundary as plain dicts and lists, decoded
//! from the same JSON the CLI writes.

use std::path::PathBuf;

use navcon_core::evalharness::{
    aggregate, bundled_records, load_corpus, load_records, load_scene_dir, run_live_eval, table_text,
    with_representation, Category, Grouping, StageRecord,
};
use navcon_core::navlang::{parse_str, validate_program};
use navcon_core::pipeline::{run_command, CodegenConfig, NavCommand, PipelineConfig, Session as CoreSession};
use navcon_core::projection::Mode;
use navcon_core::worldsim::{load_scene, parse_scene, World};
use navcon_core::DATA_DIR;
use pyo3::exceptions::{PyFileNotFoundError, PyValueError};
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Parses a serde enum from its wire name.
fn enum_arg<T: DeserializeOwned>(what: &str, s: &str) -> PyResult<T> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| PyValueError::new_err(format!("unknown {what} {s:?}")))
}

fn mode_arg(s: &str) -> PyResult<Mode> {
    enum_arg("representation", &s.to_ascii_uppercase())
}

fn data(rel: &str) -> PathBuf {
    PathBuf::from(DATA_DIR).join(rel)
}

fn pipeline_config(fixture_dir: Option<PathBuf>, seed: u64) -> PipelineConfig {
    PipelineConfig::new(CodegenConfig::fixtures(fixture_dir.unwrap_or_else(|| data("fixtures"))), seed)
}

fn command(
    scene: &str,
    text: &str,
    fixture: Option<String>,
    target: Option<String>,
    representation: &str,
    category: Option<&str>,
) -> PyResult<NavCommand> {
    let mut cmd = NavCommand::new(text, scene).representation(mode_arg(representation)?);
    if let Some(id) = fixture {
        cmd = cmd.fixture(id);
    }
    cmd.target = target;
    cmd.category = category.map(|c| enum_arg::<Category>("category", c)).transpose()?;
    Ok(cmd)
}

/// A loaded scene with its voxelized world.
#[pyclass(module = "navcon", frozen)]
pub struct Scene {
    world: World,
}

#[pymethods]
impl Scene {
    /// Loads a scene file, or a bundled scene by name.
    #[staticmethod]
    fn load(path_or_name: &str) -> PyResult<Self> {
        let mut path = PathBuf::from(path_or_name);
        if !path.exists() && !path_or_name.contains(['/', '.']) {
            path = data(&format!("scenes/{path_or_name}.json"));
        }
        if !path.exists() {
            return Err(PyFileNotFoundError::new_err(format!("scene file {path_or_name} not found")));
        }
        let spec = load_scene(&path).map_err(value_err)?;
        Ok(Self { world: World::new(spec) })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            world: World::new(parse_scene(text).map_err(value_err)?),
        })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.world.scene.name
    }

    #[getter]
    fn object_ids(&self) -> Vec<String> {
        self.world.scene.objects.iter().map(|o| o.id.clone()).collect()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.world.scene)
    }

    fn __repr__(&self) -> String {
        format!("Scene({:?}, {} objects)", self.world.scene.name, self.world.scene.objects.len())
    }
}

/// A robot in one scene; each command starts where the previous one ended.
#[pyclass(module = "navcon")]
pub struct Session {
    inner: CoreSession,
    cfg: PipelineConfig,
}

#[pymethods]
impl Session {
    #[new]
    #[pyo3(signature = (scene, fixture_dir=None, seed=0))]
    fn new(scene: &Scene, fixture_dir: Option<PathBuf>, seed: u64) -> Self {
        Self {
            inner: CoreSession::new(scene.world.clone()),
            cfg: pipeline_config(fixture_dir, seed),
        }
    }

    /// Runs one command and returns its report.
    #[pyo3(signature = (text, fixture=None, target=None, representation="A", category=None))]
    fn run<'py>(
        &mut self,
        py: Python<'py>,
        text: &str,
        fixture: Option<String>,
        target: Option<String>,
        representation: &str,
        category: Option<&str>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let cmd = command(&self.inner.world.scene.name, text, fixture, target, representation, category)?;
        let report = self.inner.run(&cmd, &self.cfg);
        to_py(py, &report)
    }

    /// Returns the robot to the scene's start pose.
    fn reset(&mut self) {
        self.inner.reset();
    }

    /// `(x, y, yaw)` of the robot.
    #[getter]
    fn pose(&self) -> (f64, f64, f64) {
        let p = self.inner.robot.pose;
        (p.x, p.y, p.yaw)
    }

    #[getter]
    fn commands_run(&self) -> usize {
        self.inner.commands_run
    }
}

/// Runs one command from the scene's start pose.
#[pyfunction]
#[pyo3(signature = (scene, text, fixture=None, target=None, representation="A", category=None, fixture_dir=None, seed=0))]
#[allow(clippy::too_many_arguments)]
fn run<'py>(
    py: Python<'py>,
    scene: &Scene,
    text: &str,
    fixture: Option<String>,
    target: Option<String>,
    representation: &str,
    category: Option<&str>,
    fixture_dir: Option<PathBuf>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let cmd = command(&scene.world.scene.name, text, fixture, target, representation, category)?;
    to_py(py, &run_command(&cmd, &scene.world, &pipeline_config(fixture_dir, seed)))
}

/// Parses and validates a navigation program.
#[pyfunction]
fn check_program<'py>(py: Python<'py>, source: &str) -> PyResult<Bound<'py, PyAny>> {
    let ast = parse_str(source).map_err(value_err)?;
    to_py(py, &validate_program(&ast))
}

fn records_arg(path: Option<PathBuf>) -> PyResult<Vec<StageRecord>> {
    match path {
        Some(p) => load_records(p).map_err(value_err),
        None => Ok(bundled_records()),
    }
}

/// Aggregates per-sentence records, the bundled set by default.
#[pyfunction]
#[pyo3(signature = (grouping="category", records=None))]
fn aggregate_records<'py>(py: Python<'py>, grouping: &str, records: Option<PathBuf>) -> PyResult<Bound<'py, PyAny>> {
    let g: Grouping = enum_arg("grouping", grouping)?;
    to_py(py, &aggregate(&records_arg(records)?, g).map_err(value_err)?)
}

/// The aggregated table as fixed-width text.
#[pyfunction]
#[pyo3(signature = (grouping="category", records=None))]
fn format_table(grouping: &str, records: Option<PathBuf>) -> PyResult<String> {
    let g: Grouping = enum_arg("grouping", grouping)?;
    Ok(table_text(&aggregate(&records_arg(records)?, g).map_err(value_err)?))
}

/// Runs every corpus entry through the pipeline in simulation.
#[pyfunction]
#[pyo3(signature = (corpus=None, scenes=None, representation=None, fixture_dir=None, seed=0))]
fn evaluate<'py>(
    py: Python<'py>,
    corpus: Option<PathBuf>,
    scenes: Option<PathBuf>,
    representation: Option<&str>,
    fixture_dir: Option<PathBuf>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let mut entries = load_corpus(corpus.unwrap_or_else(|| data("corpus/simulation.json"))).map_err(value_err)?;
    if let Some(r) = representation {
        entries = with_representation(&entries, mode_arg(r)?);
    }
    let scenes = load_scene_dir(scenes.unwrap_or_else(|| data("scenes"))).map_err(value_err)?;
    let result = run_live_eval(&entries, &scenes, &pipeline_config(fixture_dir, seed)).map_err(value_err)?;
    to_py(py, &result)
}

/// Directory of bundled scenes, fixtures, corpora and records.
#[pyfunction]
fn data_dir() -> &'static str {
    DATA_DIR
}

#[pymodule]
fn navcon(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scene>()?;
    m.add_class::<Session>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(check_program, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate_records, m)?)?;
    m.add_function(wrap_pyfunction!(format_table, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(data_dir, m)?)?;
    Ok(())
}
