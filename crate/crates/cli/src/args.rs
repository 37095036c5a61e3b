use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hermult_core::Exponent;

#[derive(Debug, Parser)]
#[command(name = "hermult", version, about = "Hermite multipliers: norms, nuclearity criteria and traces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// `L^p` norms of Hermite functions against the asymptotic model.
    Norms(NormsArgs),
    /// Nuclearity verdict for a multiplier between `L^p1` and `L^p2`.
    Criterion(CriterionArgs),
    /// Trace of a multiplier by every available route.
    Trace(TraceArgs),
    /// Trace of the Hermite semigroup over a grid of times.
    Semigroup(SemigroupArgs),
    /// Mehler's closed form against the truncated series kernel.
    Kernel(KernelArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Dimension of the underlying space.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Partition cutoff for the asymptotic weights.
    #[arg(long, default_value_t = 10)]
    pub k: u32,
    /// Truncation order |ν| ≤ N.
    #[arg(long = "N", default_value_t = 200)]
    pub truncation: u32,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    /// One-dimensional degrees d; in dimension n the index is (d, …, d).
    #[arg(long = "degree", value_delimiter = ',', default_values_t = [10u32, 50, 100, 200, 500])]
    pub degrees: Vec<u32>,
    /// Exponents; decimals, fractions like 4/3, or `inf`.
    #[arg(long = "p", value_delimiter = ',', default_values = ["1", "2", "4", "6", "inf"])]
    pub exponents: Vec<Exponent>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CriterionArgs {
    #[arg(long, default_value = "2")]
    pub p1: Exponent,
    #[arg(long, default_value = "2")]
    pub p2: Exponent,
    /// Nuclearity order r ∈ (0, 1].
    #[arg(long, conflicts_with = "gl_order")]
    pub r: Option<f64>,
    /// Take r = 1/(1 + |1/p − 1/2|) for this p.
    #[arg(long)]
    pub gl_order: Option<Exponent>,
    /// `heat:<t>`, `power:<a>` or `table:<path>`.
    #[arg(long, default_value = "heat:1")]
    pub symbol: String,
    /// Also compute the direct sum over the norms of the Hermite functions.
    #[arg(long)]
    pub direct: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long, default_value = "heat:1")]
    pub symbol: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SemigroupArgs {
    #[arg(long = "t", value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
    pub times: Vec<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long = "t", value_delimiter = ',', default_values_t = [1.0])]
    pub times: Vec<f64>,
    /// Grid points per axis on [−L, L]; the grid runs along the diagonal in dimension n.
    #[arg(long, default_value_t = 5)]
    pub points: usize,
    #[arg(long, default_value_t = 2.0)]
    pub half_width: f64,
    #[command(flatten)]
    pub common: Common,
}
