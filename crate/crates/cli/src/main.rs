use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "aqrm", version, about = "Exceptional spectrum of the asymmetric quantum Rabi model")]
struct Cli {
    /// Output format; defaults to csv for `sweep` and `gfunction`, json otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Add one to the constant term of a single recurrence coefficient.
    #[arg(long, global = true, value_name = "STEP")]
    inject_fault: Option<u32>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Print a constraint polynomial.
    Poly(PolyArgs),
    /// Isolate the positive roots of P^(N,eps)_N at fixed d.
    Roots(RootArgs),
    /// Crossing records, optionally confirmed by diagonalization.
    Crossings(CrossingArgs),
    /// Check the eps = 1/2 three-term identity for every k <= N.
    VerifyIdentity(IdentityArgs),
    /// Check divisibility and positivity of the quotient P~ / P.
    VerifyConjecture(ConjectureArgs),
    /// sl2 commutation relations, Casimirs, submodules, intertwiner, K blocks.
    RepCheck(RepArgs),
    /// Reduced eigenproblem against the direct Heun operators.
    HeunCheck(HeunArgs),
    /// Zeros of the G-functions, confirmed in the truncated spectrum.
    Gfunction(GArgs),
    /// Eigenvalue curves over a grid of couplings.
    Sweep(SweepArgs),
}

fn rational(s: &str) -> Result<aqrm::Rational, String> {
    aqrm::exactpoly::parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
pub struct PolyArgs {
    #[arg(long = "N")]
    pub n: u32,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    pub two_eps: i32,
    /// Step; defaults to N.
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub tilde: bool,
}

#[derive(Args, Debug)]
pub struct RootArgs {
    #[arg(long = "N")]
    pub n: u32,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    pub two_eps: i32,
    /// d = Delta^2 as p/q.
    #[arg(long, value_parser = rational)]
    pub delta2: aqrm::Rational,
    /// Width of the isolating intervals, as p/q.
    #[arg(long, value_parser = rational, default_value = "1/100000000000000000000")]
    pub precision: aqrm::Rational,
}

#[derive(Args, Debug)]
pub struct CrossingArgs {
    #[command(flatten)]
    pub roots: RootArgs,
    #[arg(long)]
    pub confirm: bool,
    #[arg(long, default_value_t = aqrm::spectrum::CROSSING_TOL)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct IdentityArgs {
    #[arg(long = "N")]
    pub n: u32,
}

#[derive(Args, Debug)]
pub struct ConjectureArgs {
    #[arg(long = "N")]
    pub n: u32,
    #[arg(long)]
    pub ell: u32,
}

#[derive(Args, Debug)]
pub struct RepArgs {
    /// Size of the constraint families whose K blocks are compared.
    #[arg(long = "N", default_value_t = 4)]
    pub n: u32,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    pub two_eps: i32,
    /// Random rational sample points per check.
    #[arg(long, default_value_t = 3)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct HeunArgs {
    #[arg(long, default_value_t = 100)]
    pub count: usize,
}

#[derive(Args, Debug)]
pub struct GArgs {
    #[arg(long = "N")]
    pub n: u32,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.01)]
    pub g_lo: f64,
    #[arg(long, default_value_t = 1.5)]
    pub g_hi: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub delta: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.0)]
    pub g_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub g_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub g_step: f64,
    /// Keep only the lowest curves.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Fock cutoff; defaults to AQRM_NMAX or 60.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Report the minimum gap between adjacent curves instead of the curves.
    #[arg(long)]
    pub gaps: bool,
}

pub struct Outcome {
    pub body: String,
    pub verified: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] aqrm::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use aqrm::Error::*;
        match self {
            CliError::Lib(NotARoot { .. } | Unconverged { .. } | CrossingUnconfirmed { .. }) => 2,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let format = cli.format.unwrap_or(match cli.cmd {
        Cmd::Sweep(_) | Cmd::Gfunction(_) => Format::Csv,
        _ => Format::Json,
    });
    let fault = cli.inject_fault.map(|step| aqrm::constraint::Fault { step });
    let ctx = commands::Ctx {
        format,
        seed: cli.seed,
        fault,
    };
    let outcome = commands::dispatch(&cli.cmd, &ctx)?;
    match &cli.out {
        Some(path) => std::fs::write(path, &outcome.body)?,
        None => std::io::stdout().lock().write_all(outcome.body.as_bytes())?,
    }
    Ok(outcome.verified)
}
