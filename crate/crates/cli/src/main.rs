mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lis_core::LisError;
use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    /// Malformed input or violated precondition.
    Precondition(String),
    /// A computation hit a mathematical failure (non-Liouville point, no convergence).
    Check(String),
    Unwritable(String),
}

impl From<LisError> for CliError {
    fn from(e: LisError) -> Self {
        match e {
            LisError::NotLiouville { .. }
            | LisError::Degenerate { .. }
            | LisError::Bracket { .. }
            | LisError::NoConvergence { .. }
            | LisError::Contactness(_) => CliError::Check(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Precondition(_) => 2,
            CliError::Unwritable(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "lis", version, about = "Checks for Liouville interpolation systems of 3-dimensional flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep a system for Liouville, contact and monotonicity conditions.
    Verify(VerifyArgs),
    /// Solve the skeleton on a base grid and write it as CSV.
    Skeleton(SkeletonArgs),
    /// Integrate the Liouville field and write the trajectory as CSV.
    Flow(FlowArgs),
    /// Check the DA deformation in the local orbit chart.
    DaCheck(DaArgs),
    /// Estimate the stable bunching constant of a model.
    Bunching(BunchingArgs),
    /// Measure skeleton displacement under a perturbation of h_s.
    Persist(PersistArgs),
    /// Run the bundled identity checks for a model.
    Suite(SuiteArgs),
}

/// Comma-separated numbers given as one argument.
#[derive(Debug, Clone, Serialize)]
pub struct NumList(pub Vec<f64>);

fn parse_list(src: &str) -> Result<NumList, String> {
    src.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"))).collect::<Result<_, _>>().map(NumList)
}

fn parse_window(src: &str) -> Result<(f64, f64), String> {
    match parse_list(src)?.0.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err("expected `a,b`".into()),
    }
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Seed for random sample points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Override the descriptor window, as `a,b`.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Option<(f64, f64)>,
    /// Also write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    pub descriptor: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, default_value_t = 1000)]
    pub random: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct SkeletonArgs {
    pub descriptor: PathBuf,
    /// Points per side of the base grid; 0 writes a header-only file.
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct FlowArgs {
    pub descriptor: PathBuf,
    /// Start point `s,x0,x1,x2`.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub start: NumList,
    /// Integration time; negative integrates backward.
    #[arg(long = "T", alias = "time", allow_hyphen_values = true)]
    pub t_total: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub dt: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct DaArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub nu: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub nubar: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub period: f64,
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// Time for the cone check, a multiple of the period.
    #[arg(long, default_value_t = 2.0)]
    pub cone_time: f64,
    #[arg(long, default_value_t = 1.0)]
    pub cone_slope: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct BunchingArgs {
    /// `cat`, `geodesic-local` or `da-chart`.
    pub model: String,
    #[arg(long, default_value_t = 64.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 256)]
    pub orbits: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct PersistArgs {
    pub descriptor: PathBuf,
    /// Perturbation of `ln h_s`, as an expression on M.
    #[arg(long, default_value = "cos(2*pi*theta)")]
    pub perturb: String,
    #[arg(long = "eps-list", value_parser = parse_list, default_value = "1e-2,1e-3,1e-4")]
    pub eps_list: NumList,
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct SuiteArgs {
    #[arg(long, default_value = "cat")]
    pub model: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("LIS_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Precondition(format!("LIS_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Precondition(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Verify(a) => commands::verify(a),
        Command::Skeleton(a) => commands::skeleton(a),
        Command::Flow(a) => commands::flow(a),
        Command::DaCheck(a) => commands::da_check(a),
        Command::Bunching(a) => commands::bunching(a),
        Command::Persist(a) => commands::persist(a),
        Command::Suite(a) => commands::suite(a),
    });
    match result {
        Ok(report) => {
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("FAIL {}: {} (value {:e})", c.name, c.detail, c.value);
            }
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(e) => {
            let msg = match &e {
                CliError::Precondition(m) => format!("error: {m}"),
                CliError::Check(m) => format!("check failed: {m}"),
                CliError::Unwritable(m) => format!("cannot write {m}"),
            };
            eprintln!("{msg}");
            ExitCode::from(e.exit_code())
        }
    }
}
