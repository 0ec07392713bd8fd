//! `qdiv`: compute, verify and certify matrix divergences from the shell.
//!
//! Exit codes: 0 success, 1 property violation, 2 parse/validation error,
//! 3 domain error, 4 inconclusive certificate.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{CliError, Outcome};

#[derive(Parser)]
#[command(name = "qdiv", version, about = "Matrix divergences, metric checks and interval certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pairwise divergence table for the matrices in a JSON file.
    Div(DivArgs),
    /// Run a seeded property suite.
    Verify(VerifyArgs),
    /// Re-run a replay instance written by a failing `verify`.
    Replay(ReplayArgs),
    /// Rigorous interval enclosure of a CND-violation quadratic form.
    Certify(CertifyArgs),
    /// Two-column CSV series for plotting.
    Plotdata(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args)]
pub struct DivArgs {
    /// Matrix file: a list of matrices or `{"matrices": [...]}`.
    pub input: PathBuf,
    /// `sdiv`, `qjsd` or `jensen:<generator>`.
    #[arg(long, default_value = "sdiv")]
    pub mode: String,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// metric | rearrange | integral | schoenberg | decomposition
    pub suite: String,
    #[arg(long)]
    pub seed: u64,
    /// Number of random trials (suite default when omitted).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Kernel JSON to test for CND alongside the schoenberg suite.
    #[arg(long)]
    pub kernel: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for standalone replay files of failing instances.
    #[arg(long)]
    pub replay_dir: Option<PathBuf>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Args)]
pub struct TolArgs {
    #[arg(long, default_value_t = 1e-10)]
    pub tol_triangle: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_bound: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_identity: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub tol_integral: f64,
    /// Relative accuracy requested from the quadrature.
    #[arg(long, default_value_t = 1e-7)]
    pub quad_rel: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol_derivative: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_scalar: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_decomposition: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol_embedding: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_gram: f64,
}

#[derive(Args)]
pub struct ReplayArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Args)]
pub struct CertifyArgs {
    /// `s2`, `s3`, or a path to an exact-rational instance file.
    pub target: String,
    /// Treat the file as a certificate and recompute it from its inputs.
    #[arg(long)]
    pub recheck: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq, Debug)]
#[value(rename_all = "snake_case")]
pub enum PlotKind {
    ShiftedDistance,
    SchoenbergSweep,
    QjsdTail,
}

#[derive(Args)]
pub struct PlotArgs {
    pub kind: PlotKind,
    /// Matrix file (first two matrices are used) or, for the sweep, a kernel
    /// file; defaults to the built-in five-point example.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("QDIV_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("QDIV_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(CliError::Parse("QDIV_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Domain(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    init_threads()?;
    match cli.command {
        Command::Div(a) => commands::divergence(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Replay(a) => commands::replay(&a),
        Command::Certify(a) => commands::certify(&a),
        Command::Plotdata(a) => commands::plotdata(&a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("qdiv: {e}");
            ExitCode::from(e.code())
        }
    }
}
