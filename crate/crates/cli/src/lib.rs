//! Command-line front end: validation suite, density tables, single-point
//! variance runs, parameter sweeps and the branch uniformity test.
//!
//! Exit codes: 0 success, 1 usage, 2 numerical failure, 3 validation failure.

mod commands;
pub mod format;
pub mod validate;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isoqec::experiments::{DEFAULT_SAMPLES, DEFAULT_UNIFORMITY_SAMPLES};
use isoqec::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(name = "isoqec", version, about = "Isotropic errors versus block-syndrome error correction")]
pub struct Cli {
    /// Worker threads for sampling; results do not depend on it.
    #[arg(long, global = true, env = "ISOQEC_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Pretty,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the closed-form and identity checks.
    Validate(ValidateArgs),
    /// Tabulate the normal error density over [0, π].
    Density(DensityArgs),
    /// Theory and simulation of the variance before and after correction.
    Variance(VarianceArgs),
    /// Variance comparison over a grid of σ and codes.
    Sweep(SweepArgs),
    /// Test that corrected states on a detected-error branch are uniform.
    Uniformity(UniformityArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Relative quadrature tolerance inside the checks.
    #[arg(long, default_value_t = validate::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub sigma: f64,
    /// Number of qubits; the state space has d = 2^n amplitudes.
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 181)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VarianceArgs {
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub n: u32,
    /// Logical qubits protected by the code.
    #[arg(long)]
    pub m: u32,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Relative stopping tolerance of the correction series.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [0.25, 0.5, 0.75])]
    pub sigma_list: Vec<f64>,
    /// Codes as `n,m` pairs separated by spaces, as one argument or several.
    #[arg(long, num_args = 1.., default_values = ["2,1", "3,1", "3,2"])]
    pub codes: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct UniformityArgs {
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub syndrome: usize,
    #[arg(long, default_value_t = DEFAULT_UNIFORMITY_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Add an equal-probability histogram test with this many bins.
    #[arg(long)]
    pub histogram_bins: Option<usize>,
}

/// A command outcome that is not a success.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
    Validation(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Numerical(_) => EXIT_NUMERICAL,
            Failure::Validation(_) => EXIT_VALIDATION,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) | Failure::Validation(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::DimensionMismatch { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

/// Parse `args` (program name first) and run; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker threads: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| commands::dispatch(&cli.command, stdout, stderr)) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.exit_code()
        }
    }
}
