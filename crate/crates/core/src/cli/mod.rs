//! Command-line surface: argument parsing, configuration and artifacts.

mod commands;
pub mod config;
pub mod parse;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;

pub use config::{Overrides, RunConfig, MIN_SAMPLES, SEED_ENV};

/// Process exit codes.
pub mod exit {
    /// Dominance consistent, or a command without a verdict succeeded.
    pub const CONSISTENT: i32 = 0;
    /// Usage, configuration or precondition error.
    pub const USAGE: i32 = 1;
    /// Dominance violated or an expectation not met.
    pub const VIOLATED: i32 = 2;
    /// Exact enumeration or lattice budget exceeded.
    pub const BUDGET: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "heavytail", version, about = "Stochastic dominance checks for weighted heavy-tailed portfolios")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every command; flags override the config file.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// `key = value` configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Master seed (falls back to HEAVYTAIL_SEED, then 0).
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Samples per arm; accepts forms such as 1e6.
    #[arg(long, global = true)]
    pub samples: Option<String>,
    /// Confidence level in (0.5, 1).
    #[arg(long, global = true)]
    pub confidence: Option<f64>,
    /// Points of the evaluation grid.
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
    /// Directory for documents and CSV files.
    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    /// Output format for tabular data (csv).
    #[arg(long, global = true)]
    pub format: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare the portfolios `eta . X` and `theta . X` by Monte Carlo.
    Compare(CompareArgs),
    /// Run catalog entries (ids, or `all`).
    Catalog(CatalogArgs),
    /// Exact CDF of a weighted sum of St. Petersburg variables.
    Stp(StpArgs),
    /// Emit the plot data of a figure as CSV.
    Figure(FigureArgs),
    /// Lattice search for the best exposure vector.
    Optimize(OptimizeArgs),
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Pareto tail indices: one value for iid margins, or one per component.
    #[arg(long, default_value = "0.5")]
    pub alpha: String,
    /// Explicit margins, comma separated (pareto:A, gpd:XI:BETA, fp:A:B:G, stp, twopoint:A:B:P).
    #[arg(long)]
    pub margin: Option<String>,
    /// Less diversified weights.
    #[arg(long)]
    pub eta: String,
    /// More diversified weights.
    #[arg(long)]
    pub theta: String,
    /// independent, comonotone, shock:A:B:G or mix:I:C:K.
    #[arg(long, default_value = "independent")]
    pub dependence: String,
    /// identity, cap:C, floor:C, excess:C, tail:C or trigger:P.
    #[arg(long, default_value = "identity")]
    pub transform: String,
    /// Trigger coupling: same, disjoint, independent or common:RHO.
    #[arg(long, default_value = "independent")]
    pub coupling: String,
    /// sorted (smallest weight on heaviest tail) or given.
    #[arg(long, default_value = "sorted")]
    pub pairing: String,
    /// Restrict the verdict to `LO,HI`.
    #[arg(long)]
    pub region: Option<String>,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    /// Entry ids, or `all`.
    #[arg(required = true)]
    pub ids: Vec<String>,
    /// Also test region-restricted entries on the full line (diagnostic only).
    #[arg(long)]
    pub full_line: bool,
}

#[derive(Debug, Args)]
pub struct StpArgs {
    /// Positive rational weights such as 1/3,1/3,1/3.
    #[arg(long)]
    pub weights: String,
    /// Level `x` (rational).
    #[arg(long)]
    pub x: String,
    /// Compute `P(S < x)` instead of `P(S <= x)`.
    #[arg(long)]
    pub strict: bool,
    /// Node budget of the enumeration.
    #[arg(long, default_value_t = crate::exact::DEFAULT_NODE_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Fig1,
    Fig2,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    pub id: FigureId,
    /// Tail index for fig2.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Largest `n` for fig2.
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    /// Tail indices `A1,A2` for fig1.
    #[arg(long)]
    pub alphas: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    P1,
    P2,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    pub problem: Problem,
    /// Pareto tail indices: one value for iid margins, or one per component.
    #[arg(long, default_value = "0.5")]
    pub alpha: String,
    /// Explicit margins, comma separated.
    #[arg(long)]
    pub margin: Option<String>,
    /// Number of components.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// quantile:P, range:LO:HI, or eu:U with U in identity, sqrt, exp, log1p, cap:C, table:X:Y;...
    #[arg(long, default_value = "quantile:0.95")]
    pub pref: String,
    /// none, sumsq:C or max:C.
    #[arg(long, default_value = "none")]
    pub penalty: String,
    #[arg(long, default_value = "independent")]
    pub dependence: String,
    /// Subdivisions per axis of the simplex lattice.
    #[arg(long, default_value_t = crate::portfolio::DEFAULT_RESOLUTION)]
    pub resolution: usize,
    /// Total exposure for p1.
    #[arg(long, default_value_t = 1.0)]
    pub total: f64,
    /// Totals searched by p2.
    #[arg(long, default_value = "0.5,1,2,4,8")]
    pub w_grid: String,
    /// Largest lattice accepted.
    #[arg(long, default_value_t = crate::portfolio::DEFAULT_LATTICE_BUDGET)]
    pub lattice_budget: u64,
}

/// Exit code for a library error.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::Budget { .. } => exit::BUDGET,
        _ => exit::USAGE,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Diagnostics go to `err`, results to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::CONSISTENT };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let command_line = args.iter().map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>().join(" ");
    let env_seed = std::env::var(SEED_ENV).ok();
    match commands::dispatch(&cli, env_seed.as_deref(), &command_line, out, err) {
        Ok(code) => code,
        // a closed pipe (`| head`) is not a failure of the run
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => exit::CONSISTENT,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            error_code(&e)
        }
    }
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
