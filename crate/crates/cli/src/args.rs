use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use textchar_core::ingestion::Format;
use textchar_core::simulation::ScenarioKind;

/// Diversity, density and homogeneity of embedding collections.
///
/// Set TEXTCHAR_THREADS to cap the worker count (0 or unset = all cores).
#[derive(Debug, Parser)]
#[command(name = "textchar", version, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a synthetic scenario and write one CSV row per sweep value
    Simulate(SimulateArgs),
    /// Profile a labelled embedding file, optionally over a down-sampling sweep
    Profile(ProfileArgs),
    /// Mean-pool token-level embeddings into one vector per sequence
    Pool(PoolArgs),
    /// Correlate sweep metrics with external model scores
    Correlate(CorrelateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Scenario {
    /// Random subsets of one blob at fractions 1.0, 0.9, ..., 0.1
    Downsample,
    /// Per-axis std 1, 2, ..., 10
    Spread,
    /// 0, 50, ..., 500 points added on a distant sphere
    Outliers,
    /// 1..10 equal blobs along the first axis
    Subclusters,
}

impl From<Scenario> for ScenarioKind {
    fn from(s: Scenario) -> Self {
        match s {
            Scenario::Downsample => ScenarioKind::DownSampling,
            Scenario::Spread => ScenarioKind::VaryingSpread,
            Scenario::Outliers => ScenarioKind::Outliers,
            Scenario::Subclusters => ScenarioKind::SubClusters,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub scenario: Scenario,
    /// Embedding dimensionality H
    #[arg(long, value_name = "N")]
    pub dims: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Points in the base blob
    #[arg(long, value_name = "N", default_value_t = 10_000)]
    pub points: usize,
    /// Per-axis std of the base blob
    #[arg(long, default_value_t = 1.0)]
    pub std: f64,
    /// Outlier sphere radius [default: 100 * std * sqrt(H)]
    #[arg(long)]
    pub radius: Option<f64>,
    /// Distance between sub-cluster centers [default: 5 * std]
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Skip the quadratic-cost homogeneity column
    #[arg(long)]
    pub no_homogeneity: bool,
    /// CSV output path [default: stdout]
    #[arg(long, value_name = "FILE.csv")]
    pub out: Option<PathBuf>,
    /// Also write an SVG line chart of each metric against the parameter
    #[arg(long, value_name = "FILE.svg")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Input format [default: from the file extension]
    #[arg(long, value_parser = parse_format)]
    pub format: Option<Format>,
    /// Comma-separated, strictly decreasing fractions; produces a sweep table
    #[arg(long, value_delimiter = ',', value_name = "F,F,...")]
    pub fractions: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Compute homogeneity on a uniform subsample of at most N rows per group
    #[arg(long, value_name = "N")]
    pub homogeneity_cap: Option<usize>,
    #[arg(long)]
    pub no_homogeneity: bool,
    /// Sample over the whole dataset instead of within each class
    #[arg(long)]
    pub unstratified: bool,
    /// JSON output path [default: stdout]
    #[arg(long, value_name = "FILE.json")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PoolArgs {
    /// Token-level JSONL: {"id", "label", "layer", "tokens": [[...], ...]}
    #[arg(long, value_name = "FILE.jsonl")]
    pub input: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Output format [default: from the file extension, else jsonl]
    #[arg(long, value_parser = parse_format)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Sweep table JSON as written by `profile --fractions`
    #[arg(long, value_name = "FILE.json")]
    pub metrics: PathBuf,
    /// CSV with a `fraction` column and one column per score
    #[arg(long, value_name = "FILE.csv")]
    pub scores: PathBuf,
    /// CSV output path [default: stdout]
    #[arg(long, value_name = "FILE.csv")]
    pub out: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: textchar_core::Error| e.to_string())
}
