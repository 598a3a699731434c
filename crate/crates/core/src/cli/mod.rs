//! The `sepvote` command line.
//!
//! Every subcommand writes into the directory given by `--out` and, with
//! `--manifest`, a `manifest.json` recording the resolved settings and input
//! digests. Exit codes: 0 success, 1 data error, 2 usage error.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use config::{digest_path, ConfigFile, RunManifest};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }

    pub(crate) fn data(e: impl std::fmt::Display) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sepvote",
    version,
    about = "Sepsis labels, utility scores, prediction diversity and voting ensembles"
)]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// TOML file of defaults; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Directory receiving every output file.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Also write manifest.json describing the run.
    #[arg(long)]
    pub manifest: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive onset times and hourly labels from records and event sidecars.
    Label(LabelArgs),
    /// Normalized utility of every algorithm, with per-patient traces.
    Score(ScoreArgs),
    /// Pairwise similarity matrix of the algorithms' predictions.
    Similarity(SimilarityArgs),
    /// Per-patient Fleiss' kappa among the top-ranked algorithms.
    Kappa(KappaArgs),
    /// Tree edit distances between parenthesized syntax trees.
    TreeDist(TreeDistArgs),
    /// Greedy selection of a weighted voting ensemble.
    EnsembleBuild(EnsembleBuildArgs),
    /// Vote an ensemble file over a prediction directory.
    EnsembleApply(EnsembleApplyArgs),
    /// Synthetic cohort and noisy predictors.
    Synth(SynthArgs),
    /// Empirical CDFs of clinical variables.
    Stats(StatsArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Label(_) => "label",
            Command::Score(_) => "score",
            Command::Similarity(_) => "similarity",
            Command::Kappa(_) => "kappa",
            Command::TreeDist(_) => "tree-dist",
            Command::EnsembleBuild(_) => "ensemble-build",
            Command::EnsembleApply(_) => "ensemble-apply",
            Command::Synth(_) => "synth",
            Command::Stats(_) => "stats",
        }
    }
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    /// Directory of `<id>.psv` records with `<id>.evt.psv` sidecars.
    #[arg(long, value_name = "DIR")]
    pub records: PathBuf,
    /// Hours before onset at which labels turn positive.
    #[arg(long)]
    pub lead: Option<i64>,
    /// Reject records over 336 hours instead of truncating them.
    #[arg(long)]
    pub no_truncate: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct LabelInput {
    /// Output of `label`, or a record directory to label on the fly.
    #[arg(long, value_name = "DIR")]
    pub labels: PathBuf,
    /// Utility preset name or TOML file of parameter overrides.
    #[arg(long, value_name = "PRESET|FILE")]
    pub params: Option<String>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub input: LabelInput,
    /// Prediction directory laid out as `<algorithm>/<patient>.psv`.
    #[arg(long, value_name = "DIR")]
    pub preds: PathBuf,
    /// Skip writing per-patient utility traces.
    #[arg(long)]
    pub no_traces: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimilarityKind {
    Unweighted,
    Weighted,
}

#[derive(Debug, Args)]
pub struct SimilarityArgs {
    #[arg(long, value_enum)]
    pub kind: SimilarityKind,
    #[arg(long, value_name = "DIR")]
    pub preds: PathBuf,
    /// Labels for utility ranking; required for the weighted kind.
    #[arg(long, value_name = "DIR")]
    pub labels: Option<PathBuf>,
    #[arg(long, value_name = "PRESET|FILE")]
    pub params: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct KappaArgs {
    /// Number of top-ranked algorithms acting as raters.
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(long, value_name = "DIR")]
    pub preds: PathBuf,
    /// Labels for utility ranking; without them algorithms are taken in id order.
    #[arg(long, value_name = "DIR")]
    pub labels: Option<PathBuf>,
    #[arg(long, value_name = "PRESET|FILE")]
    pub params: Option<String>,
    /// Histogram bins over [-1, 1].
    #[arg(long)]
    pub bins: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TreeDistArgs {
    /// Directory of `.ast` files; the file stem is the id.
    #[arg(long, value_name = "DIR")]
    pub trees: PathBuf,
    /// `scores.csv` from `score`, used to order rows.
    #[arg(long, value_name = "FILE")]
    pub scores: Option<PathBuf>,
    #[arg(long)]
    pub insert_cost: Option<f64>,
    #[arg(long)]
    pub delete_cost: Option<f64>,
    #[arg(long)]
    pub relabel_cost: Option<f64>,
    /// Similarity for identical trees; default is ten times the largest finite value.
    #[arg(long)]
    pub cap: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct EnsembleBuildArgs {
    #[command(flatten)]
    pub input: LabelInput,
    #[arg(long, value_name = "DIR")]
    pub preds: PathBuf,
    /// Comma-separated candidate ids (default: every algorithm).
    #[arg(long, value_delimiter = ',')]
    pub candidates: Vec<String>,
    /// Vote rule of the familiar regime: majority, threshold:<x> or all-but-one.
    #[arg(long)]
    pub familiar_rule: Option<String>,
    #[arg(long)]
    pub unfamiliar_rule: Option<String>,
    /// Mean similarity above which the unfamiliar regime applies.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Select a separate multiset under the unfamiliar rule.
    #[arg(long)]
    pub separate_regimes: bool,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct EnsembleApplyArgs {
    /// Ensemble file written by `ensemble-build`.
    #[arg(long, value_name = "FILE")]
    pub spec: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub preds: PathBuf,
    /// auto, familiar or unfamiliar (default: the file's selector).
    #[arg(long)]
    pub regime: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub patients: Option<usize>,
    #[arg(long)]
    pub min_hours: Option<usize>,
    #[arg(long)]
    pub max_hours: Option<usize>,
    #[arg(long)]
    pub prevalence: Option<f64>,
    #[arg(long)]
    pub lead: Option<i64>,
    /// Number of predictors.
    #[arg(long)]
    pub algorithms: Option<usize>,
    #[arg(long)]
    pub fp_rate: Option<f64>,
    #[arg(long)]
    pub fn_rate: Option<f64>,
    #[arg(long)]
    pub max_lag: Option<u32>,
    /// Weight of the shared noise source.
    #[arg(long)]
    pub rho: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Record directory, optionally as `GROUP=DIR`; repeatable.
    #[arg(long, value_name = "[GROUP=]DIR", required = true)]
    pub records: Vec<String>,
    /// Comma-separated variable names (default: all).
    #[arg(long, value_delimiter = ',')]
    pub variables: Vec<String>,
    #[command(flatten)]
    pub output: Output,
}

/// Parses `args` (program name first) and runs the subcommand. Returns the
/// process exit code; messages go to stdout or stderr.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            let kind = match e {
                CliError::Usage(_) => "usage error",
                CliError::Data(_) => "error",
            };
            eprintln!("sepvote: {kind}: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let workers = cli.workers.or(config.workers);
    if workers == Some(0) {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| commands::execute(&cli.command, &config))
}
