use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dilemma_cli::{cmd_score, cmd_simulate, cmd_solve, cmd_sweep, CliResult};
use dilemma_core::index_model::EvaluationMode;

#[derive(Parser)]
#[command(name = "dilemma", version, about = "Split-player ordinal game analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and write the decision report (JSON).
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        /// Override the scenario's evaluation mode: paper | computed.
        #[arg(long)]
        mode: Option<EvaluationMode>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a grid of r, s, C, Q values and write a CSV table.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// name=start:stop:step, repeatable; the first axis varies slowest.
        #[arg(long)]
        grid: Vec<String>,
        #[arg(long)]
        mode: Option<EvaluationMode>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a survey CSV (respondent_id,item1,...,item7).
    Score {
        survey: PathBuf,
        /// Instrument definition overriding the bundled one.
        #[arg(long)]
        instrument: Option<PathBuf>,
        /// Skip malformed rows instead of failing.
        #[arg(long)]
        lenient: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate equilibrium selection and compare with the closed form.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        mode: Option<EvaluationMode>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Solve { scenario, mode, out } => cmd_solve(&scenario, mode, out.as_deref()),
        Command::Sweep { scenario, grid, mode, out } => cmd_sweep(&scenario, mode, &grid, out.as_deref()),
        Command::Score { survey, instrument, lenient, out } => {
            cmd_score(&survey, instrument.as_deref(), lenient, out.as_deref())
        }
        Command::Simulate { scenario, mode, trials, seed, out } => {
            cmd_simulate(&scenario, mode, trials, seed, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
