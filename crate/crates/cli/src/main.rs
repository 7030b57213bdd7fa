//! `avqc`: batch analyses of arbitrarily varying quantum channels.
//!
//! Exit status: 0 on success, 2 when some verdict is undecided, 1 on errors.

mod commands;
mod error;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::Ctx;
use error::{CliError, CliResult};
use report::{Format, Status};

#[derive(Parser, Debug)]
#[command(name = "avqc", version, about = "Analyses of arbitrarily varying quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Channel-set JSON file.
    #[arg(long, global = true)]
    channels: Option<PathBuf>,

    /// Block length.
    #[arg(long, global = true, default_value_t = 1)]
    l: usize,

    /// Numerical tolerance.
    #[arg(long, global = true, env = "AVQC_TOL", default_value_t = 1e-6)]
    tol: f64,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Restarts of the outer ascent.
    #[arg(long, global = true, default_value_t = avqc::capacity::DEFAULT_RESTARTS)]
    restarts: usize,

    /// Report destination; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Print wall time to stderr.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-channel structure plus single-letter capacity and symmetrizability.
    Analyze,
    /// Symmetrizability verdicts for l = 1..L.
    Symmetrize {
        /// Random pure states added to the basis pair.
        #[arg(long, default_value_t = 1)]
        extra_states: usize,
    },
    /// Maximin coherent information at block length l.
    Capacity,
    /// Confusability spaces, θ̃ and optional zero-error code verification.
    ZeroError {
        #[arg(long)]
        code: Option<PathBuf>,
    },
    /// Runs one experiment described by a config file.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Worst-case evaluation of a supplied code.
    VerifyCode {
        #[arg(long)]
        code: Option<PathBuf>,
    },
}

fn run(cli: &Cli) -> CliResult<Status> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    if !(cli.tol > 0.0 && cli.tol < 1.0) {
        return Err(CliError::Usage(format!("--tol must lie in (0, 1), got {}", cli.tol)));
    }
    let ctx = Ctx {
        l: cli.l,
        tol: cli.tol,
        seed: cli.seed,
        restarts: cli.restarts,
        extra_states: match cli.command {
            Command::Symmetrize { extra_states } => extra_states,
            _ => 1,
        },
    };
    let start = Instant::now();
    let channels = cli.channels.as_deref();
    let report = match &cli.command {
        Command::Analyze => commands::analyze(channels, &ctx)?,
        Command::Symmetrize { .. } => commands::symmetrize(channels, &ctx)?,
        Command::Capacity => commands::capacity(channels, &ctx)?,
        Command::ZeroError { code } => commands::zero_error(channels, code.as_deref(), &ctx)?,
        Command::Simulate { config } => commands::simulate(config.as_deref(), channels, &ctx)?,
        Command::VerifyCode { code } => commands::verify_code(channels, code.as_deref(), &ctx)?,
    };
    let text = report::render(&report, cli.format)?;
    match &cli.out {
        Some(path) => report::write_atomic(path, &text)?,
        None => print!("{text}"),
    }
    if cli.timing {
        eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    }
    Ok(report.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Undecided) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
