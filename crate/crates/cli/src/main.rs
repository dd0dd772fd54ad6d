//! `idealflow` command-line tool.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error,
//! 3 graph not strongly connected.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use idealflow::ScaleMode;

#[derive(Debug, Parser)]
#[command(
    name = "idealflow",
    version,
    about = "Network structure, utilization and ideal flow matrices"
)]
pub struct Cli {
    /// Print progress details to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write A, P, E, P̂ and Ê for an edge list.
    Matrices {
        graph: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write the analytic ideal flow, stationary distribution and classification.
    Ideal {
        graph: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::MinNormalized)]
        mode: ModeArg,
        /// Tolerance for matrix property checks.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Run seeded random-walk agents and measure convergence to the ideal flow.
    Simulate {
        graph: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 100)]
        agents: u64,
        #[arg(long, default_value_t = 10_000)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        checkpoints: u64,
        /// Space checkpoints logarithmically instead of evenly.
        #[arg(long)]
        log_checkpoints: bool,
        /// Uncounted steps each agent takes before counting starts.
        #[arg(long, default_value_t = 0)]
        warmup: u64,
        /// Also write every agent's walk to trajectories.txt.
        #[arg(long)]
        record: bool,
    },
    /// Write flow, OD, indirect, alternative and substitute matrices at all levels.
    Analyze {
        graph: PathBuf,
        trajectories: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the inequality chain, the four structure identities and premagic.
    Verify {
        graph: PathBuf,
        trajectories: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
        /// Tolerance for the premagic check on the real-valued ideal flow.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Overwrite one count cell before verifying: `MATRIX:ROW:COL:VALUE`
        /// with MATRIX one of F, D, L, T.
        #[arg(long, hide = true)]
        inject_defect: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output directory, created if missing.
    #[arg(short, long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    MinNormalized,
    Probability,
}

impl From<ModeArg> for ScaleMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::MinNormalized => ScaleMode::MinNormalized,
            ModeArg::Probability => ScaleMode::Probability,
        }
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
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            for detail in &failure.details {
                eprintln!("  {detail}");
            }
            ExitCode::from(failure.code)
        }
    }
}
