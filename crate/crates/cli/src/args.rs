use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kcore_core::graphs::PercolationStrategy;

#[derive(Debug, Parser)]
#[command(
    name = "kcore-lab",
    version,
    about = "k-cores of percolated dense graphs versus branching-process predictions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "KCORE_LAB_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Percolate a generated graph repeatedly and compare k-core sizes with the prediction.
    Verify(VerifyArgs),
    /// Scan P(A) over a range of scales and locate the k-core threshold.
    Threshold(ThresholdArgs),
    /// Cut distance and P(A) along a kernel family converging to a limit.
    Continuity(ContinuityArgs),
    /// Cut distance between two step kernels.
    Cutnorm(CutnormArgs),
    /// `verify` on a Paley graph against the constant kernel 1/2.
    Paley(PaleyArgs),
    /// Render two columns of a CSV file as an SVG line plot.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PercolationArgs {
    /// Percolation intensity c.
    #[arg(long, default_value_t = 5.0)]
    pub c: f64,
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    #[arg(long, default_value_t = 20)]
    pub trials: u64,
    /// Predict P(A_d) instead of the limit P(A).
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "fast", value_parser = parse_strategy)]
    pub strategy: PercolationStrategy,
    /// Fixed-point tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Record wall-clock times (makes the output run-dependent).
    #[arg(long)]
    pub timing: bool,
    /// CSV output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG plot of the per-trial fractions.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Preset name (constant[:a], remark-a, remark-b, checkerboard, product) or kernel JSON file.
    #[arg(long, default_value = "constant")]
    pub kernel: String,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[command(flatten)]
    pub run: PercolationArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PaleyArgs {
    /// Prime q with q = 1 mod 4.
    #[arg(long, default_value_t = 101)]
    pub q: u64,
    #[command(flatten)]
    pub run: PercolationArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    #[arg(long, default_value = "constant")]
    pub kernel: String,
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    #[arg(long = "c-min", default_value_t = 0.0)]
    pub c_min: f64,
    #[arg(long = "c-max", default_value_t = 10.0)]
    pub c_max: f64,
    /// Points on the uniform P(A) curve.
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Width of the final bisection bracket.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// P(A) at or below this counts as zero.
    #[arg(long, default_value_t = 1e-8)]
    pub eps: f64,
    /// Smallest rise between neighbouring curve points reported as a jump.
    #[arg(long = "min-jump", default_value_t = 0.01)]
    pub min_jump: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Embedded Paley graphs against the constant kernel 1/2.
    Paley,
    /// Dyadic finitary approximations of a kernel.
    Dyadic,
}

#[derive(Debug, Clone, Args)]
pub struct ContinuityArgs {
    #[arg(long, value_enum, default_value_t = Family::Paley)]
    pub family: Family,
    /// Kernel approximated by the dyadic family.
    #[arg(long, default_value = "product")]
    pub kernel: String,
    #[arg(long, value_delimiter = ',', default_values_t = vec![13u64, 101, 1009, 9973])]
    pub q: Vec<u64>,
    /// Dyadic levels 1..=levels.
    #[arg(long, default_value_t = 6)]
    pub levels: u32,
    #[arg(long, default_value_t = 8.0)]
    pub c: f64,
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CutMode {
    Both,
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, Args)]
pub struct CutnormArgs {
    #[arg(long)]
    pub kernel: String,
    /// Second kernel.
    #[arg(long)]
    pub against: String,
    #[arg(long, value_enum, default_value_t = CutMode::Both)]
    pub mode: CutMode,
    #[arg(long, default_value_t = kcore_core::kernels::DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// CSV file written by one of the other commands.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    /// Column whose values split the rows into separate lines.
    #[arg(long)]
    pub series: Option<String>,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_strategy(s: &str) -> Result<PercolationStrategy, String> {
    s.parse().map_err(|e: kcore_core::Error| e.to_string())
}
