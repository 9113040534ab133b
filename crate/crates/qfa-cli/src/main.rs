//! `qfa`: language instances, machine specs, simulation and exact analysis.

mod commands;
mod config;
mod machines;
mod output;
mod verify;

use clap::{Args, Parser, Subcommand, ValueEnum};
use machines::MachineArgs;
use qfa_core::Family;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Cap(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Cap(_) => 3,
        }
    }
}

/// What a successful command concluded.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Done,
    Negative,
}

#[derive(Debug, Parser)]
#[command(
    name = "qfa",
    version,
    about = "Two-way quantum-classical finite automata toolkit"
)]
pub struct Cli {
    /// TOML file of flag defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the artifact here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Leave the timestamp out of the provenance block.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Compiled,
    Interp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GenFormat {
    Json,
    Lines,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimArgs {
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1 << 32)]
    pub max_steps: u64,
    /// compiled: trajectories of the machine; interp: host interpreter of a template.
    #[arg(long, value_enum, default_value_t = Engine::Compiled)]
    pub engine: Engine,
    /// Interpreter samples every core step instead of drawing round outcomes.
    #[arg(long)]
    pub stepwise: bool,
    /// Run trials on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit members, or a negative corpus of near-members.
    Gen {
        #[arg(long)]
        family: Option<Family>,
        #[arg(long)]
        i: Option<usize>,
        /// Base-word length.
        #[arg(long)]
        n: Option<usize>,
        /// Segment length.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 64)]
        limit: usize,
        /// Emit the structured negative corpus instead.
        #[arg(long)]
        negative: bool,
        #[arg(long, default_value_t = 50)]
        per_class: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = GenFormat::Json)]
        format: GenFormat,
    },
    /// Membership by the exact oracle; exit 1 on a nonmember.
    Check {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        i: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        input: String,
    },
    /// Write a machine spec, or validate one with --validate.
    Build {
        #[command(flatten)]
        machine: MachineArgs,
        #[arg(long, conflicts_with_all = ["machine", "spec"])]
        validate: Option<PathBuf>,
    },
    /// One trajectory.
    Run {
        #[command(flatten)]
        machine: MachineArgs,
        #[arg(long, allow_hyphen_values = true)]
        input: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1 << 32)]
        max_steps: u64,
    },
    /// Monte Carlo acceptance estimate with a Wilson interval.
    Estimate {
        #[command(flatten)]
        machine: MachineArgs,
        #[arg(long, allow_hyphen_values = true)]
        input: String,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Exact halting probabilities and expected steps.
    Exact {
        #[command(flatten)]
        machine: MachineArgs,
        #[arg(long, allow_hyphen_values = true)]
        input: String,
        #[arg(long)]
        config_cap: Option<usize>,
        #[arg(long)]
        node_cap: Option<usize>,
    },
    /// One CSV row per size point.
    Sweep {
        #[command(flatten)]
        machine: MachineArgs,
        /// Base-word lengths, e.g. 2..8 or 7,57.
        #[arg(long)]
        n: Option<String>,
        /// Segment lengths.
        #[arg(long)]
        m: Option<String>,
        /// Family the inputs are drawn from; defaults follow the machine.
        #[arg(long)]
        family: Option<Family>,
        /// Which member of each size to use.
        #[arg(long, default_value_t = 0)]
        pick: usize,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Invariant suites: lang, rw-gate, counter, zoo.
    Verify {
        #[arg(long = "suite", default_values_t = verify::SUITES.map(String::from))]
        suites: Vec<String>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::dispatch(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Cap(m) => eprintln!("resource cap: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}
