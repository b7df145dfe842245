//! `permkit`: permanents, identity checks, phase estimators and
//! linear-optics sampling from the command line. Results go to stdout as
//! JSON, a run manifest and diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 bad input, 2 an identity check failed.

mod commands;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "permkit", version, about = "Permanents, permanent identities and boson sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Permanent of a (repeated) matrix.
    Per(PerArgs),
    /// Run identity checks.
    Verify(VerifyArgs),
    /// Monte Carlo permanent estimate from random phases.
    Estimate(EstimateArgs),
    /// Sample photon-count outcomes of a linear interferometer.
    Sample(SampleArgs),
    /// Capabilities and the cat-amplitude regime table.
    Report(ReportArgs),
}

#[derive(Args, Debug, Serialize)]
struct PerArgs {
    /// Matrix JSON file: {"dim": m, "entries": [[re, im], ...]}.
    #[arg(long)]
    matrix: String,
    /// naive, ryser, glynn, glynn-repeated-rows, glynn-roots-of-unity, glynn-kan, glynn-kan-repeated or cauchy-binet.
    #[arg(long, default_value = "ryser")]
    algo: String,
    /// Row repetitions, e.g. 2,0,1.
    #[arg(long)]
    rows: Option<String>,
    /// Column repetitions.
    #[arg(long)]
    cols: Option<String>,
    /// Second matrix for cauchy-binet (defaults to the identity).
    #[arg(long)]
    b: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// Run every registered check.
    #[arg(long, conflicts_with = "identity")]
    all: bool,
    /// Name of one check (see `permkit report` for the list).
    #[arg(long, required_unless_present = "all")]
    identity: Option<String>,
    /// Use this matrix instead of random ones (single-matrix identities only).
    #[arg(long, requires = "identity")]
    matrix: Option<String>,
    /// Degree cap per variable, e.g. 2,2,2.
    #[arg(long, requires = "matrix")]
    cap: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = permkit::numerics::DEFAULT_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args, Debug, Serialize)]
struct EstimateArgs {
    /// Matrix JSON file.
    #[arg(long)]
    matrix: String,
    #[arg(long)]
    rows: Option<String>,
    #[arg(long)]
    cols: Option<String>,
    /// One of exp, pown, geom, log; several (comma-separated) run a variance scan.
    #[arg(long, default_value = "exp")]
    f: String,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    /// Unitary matrix JSON file.
    #[arg(long)]
    unitary: String,
    /// fock (one photon in each of the first n modes) or cat.
    #[arg(long, default_value = "fock")]
    input: String,
    /// Cat amplitude as re,im.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Number of occupied input modes.
    #[arg(long)]
    n: usize,
    /// Largest total photon number enumerated (default n + 6).
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep only outcomes with this total photon number.
    #[arg(long)]
    reject_to: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct ReportArgs {
    /// Largest n in the regime table.
    #[arg(long, default_value_t = 16)]
    n_max: usize,
    /// Number of modes.
    #[arg(long, default_value_t = 100)]
    m: usize,
    /// Amplitude scale: alpha = c n^(-1/4) (ln m)^(1/4).
    #[arg(long, default_value_t = 1.0)]
    c: f64,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Per(_) => "per",
            Command::Verify(_) => "verify",
            Command::Estimate(_) => "estimate",
            Command::Sample(_) => "sample",
            Command::Report(_) => "report",
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Verify(a) => Some(a.seed),
            Command::Estimate(a) => Some(a.seed),
            Command::Sample(a) => Some(a.seed),
            Command::Per(_) | Command::Report(_) => None,
        }
    }
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    parameters: serde_json::Value,
    seed: Option<u64>,
    tool_version: &'a str,
    wall_time_ms: u128,
}

/// What a command produced: the full stdout text and whether a check failed.
pub struct Outcome {
    pub stdout: String,
    pub failed: bool,
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("PERMKIT_THREADS") {
        let n: usize = v.parse().map_err(|_| anyhow::anyhow!("PERMKIT_THREADS must be a positive integer, got '{v}'"))?;
        if n == 0 {
            anyhow::bail!("PERMKIT_THREADS must be a positive integer");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let start = Instant::now();

    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Per(a) => commands::per(a),
        Command::Verify(a) => commands::verify(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Sample(a) => commands::sample(a),
        Command::Report(a) => commands::report(a),
    });

    let manifest = RunManifest {
        command: cli.command.name(),
        parameters: serde_json::to_value(&cli.command).unwrap_or(serde_json::Value::Null),
        seed: cli.command.seed(),
        tool_version: env!("CARGO_PKG_VERSION"),
        wall_time_ms: start.elapsed().as_millis(),
    };
    if let Ok(text) = serde_json::to_string(&manifest) {
        eprintln!("{text}");
    }

    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            if out.failed {
                eprintln!("error: at least one identity check failed");
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
