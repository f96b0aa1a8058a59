use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use navcon_core::evalharness::{
    aggregate, emit_report, load_corpus, load_records, load_scene_dir, run_live_eval, table_text, with_representation,
    AggregateTable, Grouping, ReportFormat, StageRecord,
};
use navcon_core::pipeline::{run_command, CodegenConfig, CodegenMode, CommandReport, NavCommand, PipelineConfig};
use navcon_core::projection::Mode;
use navcon_core::worldsim::{load_scene, World};
use navcon_core::DATA_DIR;

use crate::server::{self, ServerConfig};

#[derive(Debug, Parser)]
#[command(name = "navcon", version, about = "Language-grounded navigation in a simulated world")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one command in a scene and report every stage.
    Run(RunArgs),
    /// Aggregate stage records or evaluate a corpus in simulation.
    Eval(EvalArgs),
    /// Host a scene over HTTP and WebSocket.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepArg {
    A,
    B,
}

impl From<RepArg> for Mode {
    fn from(r: RepArg) -> Self {
        match r {
            RepArg::A => Mode::A,
            RepArg::B => Mode::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodegenArg {
    Fixture,
    Live,
}

/// Program source options shared by every subcommand that runs commands.
#[derive(Debug, Clone, Args)]
pub struct CodegenArgs {
    #[arg(long, value_enum, default_value = "fixture")]
    pub codegen: CodegenArg,
    /// Directory of fixture programs, one `<id>.py` per corpus id.
    #[arg(long)]
    pub fixture_dir: Option<PathBuf>,
    /// Chat-completion endpoint for live generation.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Name of the environment variable holding the bearer token.
    #[arg(long)]
    pub token_env: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    /// Prompt template containing the query marker once.
    #[arg(long)]
    pub prompt_template: Option<PathBuf>,
    #[arg(long, default_value_t = 60)]
    pub timeout_secs: u64,
}

impl CodegenArgs {
    pub fn config(&self) -> Result<CodegenConfig> {
        let cfg = CodegenConfig {
            mode: match self.codegen {
                CodegenArg::Fixture => CodegenMode::Fixture,
                CodegenArg::Live => CodegenMode::Live,
            },
            endpoint: self.endpoint.clone(),
            token_env: self.token_env.clone(),
            model: self.model.clone(),
            prompt_template: self.prompt_template.clone(),
            fixture_dir: self.fixture_dir.clone().unwrap_or_else(default_fixture_dir),
            timeout_secs: self.timeout_secs,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Scene file, or the name of a bundled scene.
    #[arg(long)]
    pub scene: String,
    #[arg(long)]
    pub command: String,
    /// Fixture id; derived from the scene and command text when omitted.
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long, value_enum, default_value = "a")]
    pub rep: RepArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Object the command refers to, for the detection and waypoint checks.
    #[arg(long)]
    pub target: Option<String>,
    /// Record wall-clock stage timings (makes reports non-reproducible).
    #[arg(long)]
    pub timings: bool,
    #[command(flatten)]
    pub codegen: CodegenArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalMode {
    Records,
    LiveSim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupArg {
    Category,
    Scene,
    Representation,
}

impl From<GroupArg> for Grouping {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::Category => Grouping::Category,
            GroupArg::Scene => Grouping::Scene,
            GroupArg::Representation => Grouping::Representation,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Records file (records mode) or simulation corpus (live-sim mode).
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum)]
    pub mode: EvalMode,
    /// Report path; `.json` selects JSON, anything else CSV.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Grouping written to the report in records mode.
    #[arg(long, value_enum, default_value = "category")]
    pub group: GroupArg,
    /// Scene directory for live-sim mode.
    #[arg(long)]
    pub scenes: Option<PathBuf>,
    /// Overrides every entry's representation in live-sim mode.
    #[arg(long, value_enum)]
    pub rep: Option<RepArg>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub codegen: CodegenArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Scene file, or the name of a bundled scene.
    #[arg(long)]
    pub scene: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Interval between streamed pose events.
    #[arg(long, default_value_t = 100)]
    pub stream_interval_ms: u64,
    #[command(flatten)]
    pub codegen: CodegenArgs,
}

pub fn data_path(rel: &str) -> PathBuf {
    Path::new(DATA_DIR).join(rel)
}

pub fn default_fixture_dir() -> PathBuf {
    data_path("fixtures")
}

/// A path that exists, or a bundled scene name such as `theater`.
pub fn resolve_scene(arg: &str) -> Result<PathBuf> {
    let p = PathBuf::from(arg);
    if p.exists() {
        return Ok(p);
    }
    let bundled = data_path(&format!("scenes/{arg}.json"));
    if !arg.contains(['/', '.']) && bundled.exists() {
        return Ok(bundled);
    }
    bail!("scene file {arg} not found")
}

pub fn load_world(arg: &str) -> Result<World> {
    let path = resolve_scene(arg)?;
    let scene = load_scene(&path).with_context(|| format!("loading scene {}", path.display()))?;
    Ok(World::new(scene))
}

pub fn run(args: &RunArgs, out: &mut impl Write) -> Result<CommandReport> {
    let world = load_world(&args.scene)?;
    let mut cfg = PipelineConfig::new(args.codegen.config()?, args.seed);
    cfg.record_timings = args.timings;
    let mut cmd = NavCommand::new(&args.command, &world.scene.name).representation(args.rep.into());
    if let Some(id) = &args.fixture {
        cmd = cmd.fixture(id);
    }
    if let Some(t) = &args.target {
        cmd = cmd.target(t);
    }
    let report = run_command(&cmd, &world, &cfg);
    let json = serde_json::to_string_pretty(&report)?;
    match &args.report {
        Some(path) => {
            std::fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
            write_stage_summary(&report, out)?;
        }
        None => writeln!(out, "{json}")?,
    }
    Ok(report)
}

pub fn write_stage_summary(report: &CommandReport, out: &mut impl Write) -> Result<()> {
    let s = &report.stages;
    for (name, stage) in [("Code", &s.code), ("OD", &s.od), ("WP", &s.wp), ("Path&Exec", &s.path_exec)] {
        let mark = if stage.pass { "pass" } else { "fail" };
        writeln!(out, "{name:<10} {mark}  {}", stage.detail)?;
    }
    Ok(())
}

fn write_table(table: &AggregateTable, out: &mut impl Write) -> Result<()> {
    writeln!(out, "{}", table_text(table))?;
    Ok(())
}

pub fn eval(args: &EvalArgs, out: &mut impl Write) -> Result<()> {
    match args.mode {
        EvalMode::Records => eval_records(args, out),
        EvalMode::LiveSim => eval_live(args, out),
    }
}

fn eval_records(args: &EvalArgs, out: &mut impl Write) -> Result<()> {
    let records = load_records(&args.corpus)?;
    for g in [Grouping::Representation, Grouping::Category, Grouping::Scene] {
        if let Ok(table) = aggregate(&records, g) {
            write_table(&table, out)?;
        }
    }
    if let Some(path) = &args.report {
        let table = aggregate(&records, args.group.into())?;
        emit_report(&table, &records, ReportFormat::from_path(path), path)?;
        writeln!(out, "report written to {}", path.display())?;
    }
    Ok(())
}

fn eval_live(args: &EvalArgs, out: &mut impl Write) -> Result<()> {
    let mut corpus = load_corpus(&args.corpus)?;
    if let Some(rep) = args.rep {
        corpus = with_representation(&corpus, rep.into());
    }
    let scenes = load_scene_dir(args.scenes.clone().unwrap_or_else(|| data_path("scenes")))?;
    let cfg = PipelineConfig::new(args.codegen.config()?, args.seed);
    let eval = run_live_eval(&corpus, &scenes, &cfg)?;
    for r in &eval.results {
        let flags: String = r.stages.flags().iter().map(|&f| if f { 'P' } else { 'F' }).collect();
        writeln!(out, "{flags}  {:?} {}", r.representation, r.id)?;
    }
    for i in &eval.invalid {
        writeln!(out, "invalid  {}: {}", i.id, i.reason)?;
    }
    match &eval.table {
        Some(table) => write_table(table, out)?,
        None => bail!("every corpus entry is invalid"),
    }
    if let Some(path) = &args.report {
        let records: Vec<StageRecord> = eval.records();
        let table = aggregate(&records, args.group.into())?;
        emit_report(&table, &records, ReportFormat::from_path(path), path)?;
        writeln!(out, "report written to {}", path.display())?;
    }
    Ok(())
}

pub fn serve(args: &ServeArgs) -> Result<()> {
    let world = load_world(&args.scene)?;
    let cfg = ServerConfig {
        pipeline: PipelineConfig::new(args.codegen.config()?, args.seed),
        stream_interval: Duration::from_millis(args.stream_interval_ms),
    };
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((args.host.as_str(), args.port)).await?;
        eprintln!("serving {} on http://{}", world.scene.name, listener.local_addr()?);
        server::serve(listener, server::AppState::new(world, cfg)).await
    })
}
