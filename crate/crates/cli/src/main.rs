use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;

#[derive(Parser)]
#[command(name = "lotto-signal", version, about = "Solve and sweep signaling General Lotto games")]
struct Cli {
    /// JSON file supplying defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one game for its optimal signaling policy.
    Solve(SolveArgs),
    /// Solve every point of a (cost, prior) grid.
    Sweep(SweepArgs),
    /// Audit the closed forms against brute-force search on random games.
    Verify(VerifyArgs),
    /// Complete-information Lotto payoffs for budgets A and B.
    Payoff(PayoffArgs),
}

#[derive(Args)]
struct GameArgs {
    #[arg(long)]
    a_high: Option<f64>,
    #[arg(long)]
    a_low: Option<f64>,
    /// Total battlefield value; defaults to 1.
    #[arg(long)]
    phi: Option<f64>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    game: GameArgs,
    /// Probability of the high budget.
    #[arg(long)]
    p: Option<f64>,
    /// Receiver's per-unit resource cost.
    #[arg(long)]
    cost: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    game: GameArgs,
    #[arg(long)]
    c_min: Option<f64>,
    #[arg(long)]
    c_max: Option<f64>,
    #[arg(long)]
    c_steps: Option<usize>,
    #[arg(long)]
    p_min: Option<f64>,
    #[arg(long)]
    p_max: Option<f64>,
    #[arg(long)]
    p_steps: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<SweepFormat>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 10_001)]
    grid: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Allowed payoff excess, as a multiple of phi.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct PayoffArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long, default_value_t = 1.0)]
    phi: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepFormat {
    Csv,
    Json,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config or a violated parameter invariant.
    Usage(String),
    Io(String),
    VerifyFailed(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Io(msg) => f.write_str(msg),
            CliError::VerifyFailed(n) => write!(f, "verification failed: {n} violations"),
        }
    }
}

impl From<lotto_signal::Error> for CliError {
    fn from(e: lotto_signal::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
