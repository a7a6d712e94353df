//! `locality-lab`: experiments on shifted-distance clustering, cluster
//! matching and staged vertex cover.
//!
//! Exit codes: 0 success, 1 audit or bound failure, 2 usage or input error,
//! 3 non-termination, 4 oracle limits exceeded.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use locality_lab::decomposition::ShiftDistribution;
use locality_lab::graph::GraphModel;
use locality_lab::vertex_cover::Profile;

pub const EXIT_AUDIT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NON_TERMINATION: u8 = 3;
pub const EXIT_ORACLE_LIMIT: u8 = 4;

const THREADS_VAR: &str = "LOCALITY_LAB_THREADS";

const GENERATORS: &str = "Generators: empty:N, path:N, star:N, complete:N, bipartite:A:B, er:N:P, regular:N:D. \
Shift distributions: poly:ALPHA, exp:LAMBDA. Set LOCALITY_LAB_THREADS to bound worker threads (0 runs \
sequentially).";

#[derive(Parser, Debug)]
#[command(name = "locality-lab", version, about, after_help = GENERATORS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", content = "args", rename_all = "snake_case")]
pub enum Command {
    /// Cluster a graph with random shifts and audit radius and adjacency counts.
    Partition(PartitionArgs),
    /// Approximate maximum matching by cluster-driven fractional weights.
    Matching(MatchingArgs),
    /// Approximate minimum weighted vertex cover by staged weight reduction.
    Vc(VcArgs),
    /// Solve small instances exactly.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Run the acceptance checks and print a pass/fail table.
    Suite(SuiteArgs),
    /// Rerun the configuration embedded in an output document.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct GraphSource {
    /// Edge-list file: `n m [weighted]`, then `u v` per edge, then `v w` per
    /// node when weighted.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    pub graph: Option<PathBuf>,
    /// Generator spec, e.g. `er:50:0.1`.
    #[arg(long = "gen", id = "gen")]
    pub generator: Option<GraphModel>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct RunArgs {
    /// Base seed; generated graphs use it directly, trial `t` uses a
    /// stream derived from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Output file (stdout when absent).
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    #[serde(skip)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Jsonl,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PartitionArgs {
    #[command(flatten)]
    pub source: GraphSource,
    #[command(flatten)]
    pub run: RunArgs,
    /// Shift distribution; defaults to poly with alpha = b ln n / ln ln n.
    #[arg(long)]
    pub dist: Option<ShiftDistribution>,
    #[arg(long, default_value_t = 4.0)]
    pub b: f64,
    /// Report adjacency counts for thresholds 0..=q-max.
    #[arg(long, default_value_t = 2)]
    pub q_max: usize,
    /// Largest share of trials allowed to fail the clustering audit.
    #[arg(long, default_value_t = 0.05)]
    pub max_failure_rate: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct MatchingArgs {
    #[command(flatten)]
    pub source: GraphSource,
    #[command(flatten)]
    pub run: RunArgs,
    /// Shift exponent for the line graph; defaults to b ln m / ln ln m.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    pub b: f64,
    /// Update factor for caps and weights.
    #[arg(long = "K", default_value_t = 2.0)]
    pub update_factor: f64,
    #[arg(long, default_value_t = 10_000)]
    pub rounds: usize,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    /// Stop once no edge is active (the default).
    #[arg(long, overrides_with = "no_fixed_point")]
    pub fixed_point: bool,
    /// Run exactly `--rounds` rounds.
    #[arg(long)]
    pub no_fixed_point: bool,
    /// Scale initial caps down when their sums exceed the premise.
    #[arg(long)]
    pub scale_caps: bool,
    /// Run the edge-local scheme without clustering.
    #[arg(long)]
    pub baseline: bool,
    /// Compare against the exact maximum matching.
    #[arg(long)]
    pub oracle: bool,
    /// Share of trials that must meet |M| >= OPT / (2 + eps) with --oracle.
    #[arg(long, default_value_t = 1.0)]
    pub min_pass_rate: f64,
    /// Write per-round records as JSON lines.
    #[arg(long)]
    #[serde(skip)]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct VcArgs {
    #[command(flatten)]
    pub source: GraphSource,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    /// Exponent preset.
    #[arg(long, default_value_t = Profile::Desk)]
    pub profile: Profile,
    /// Shift exponent; defaults to b ln n / ln ln n.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 30.0)]
    pub b: f64,
    /// Value used for log n; defaults to max(ln n, e).
    #[arg(long)]
    pub log_n: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub phase_budget: usize,
    #[arg(long)]
    pub stage_cap: Option<usize>,
    /// End phases at their fixed point (the default).
    #[arg(long, overrides_with = "no_fixed_point")]
    pub fixed_point: bool,
    /// Run every phase for the full budget.
    #[arg(long)]
    pub no_fixed_point: bool,
    /// Keep phase-1 requests at full size even where they can outrun a
    /// cluster's reserve.
    #[arg(long)]
    pub no_request_scaling: bool,
    /// Give every node weight 1.
    #[arg(long)]
    pub unit_weights: bool,
    /// Compare against the exact minimum weight cover.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    #[serde(skip)]
    pub trace: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleCommand {
    /// Minimum weight vertex cover.
    Vc(OracleArgs),
    /// Maximum cardinality matching.
    Matching(OracleArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct OracleArgs {
    #[command(flatten)]
    pub source: GraphSource,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Give every node weight 1.
    #[arg(long)]
    pub unit_weights: bool,
    #[arg(long, default_value_t = 24)]
    pub max_nodes: usize,
    #[arg(long, default_value_t = 40)]
    pub max_edges: usize,
    #[arg(long)]
    pub time_budget_ms: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = 20_240_601)]
    pub seed: u64,
    /// Run a reduced workload.
    #[arg(long)]
    pub quick: bool,
    /// Write the full report, payloads included, as JSON.
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ReplayArgs {
    /// A JSON document written by an earlier run.
    pub document: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// A command failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn oracle_limit(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_ORACLE_LIMIT,
            message: message.into(),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| Failure::usage(format!("{THREADS_VAR}={value} is not a count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build_global()
        .map_err(|e| Failure::usage(format!("cannot configure worker threads: {e}")))
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Partition(args) => commands::partition(&args),
        Command::Matching(args) => commands::matching(&args),
        Command::Vc(args) => commands::vc(&args),
        Command::Oracle(cmd) => commands::oracle(&cmd),
        Command::Suite(args) => commands::suite(&args),
        Command::Replay(args) => run(commands::replayed(&args)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = configure_threads().and_then(|()| run(cli.command));
    eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
