//! Command-line front end for the quench and echo simulations: parameter
//! sweeps, figure data as CSV or JSON, run manifests and the exact-oracle
//! comparison.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::commands::Verdict;
use crate::config::{Command, Overrides, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Invalid flags or config file (exit code 2).
    Config(String),
    /// A numerical routine failed (exit code 3).
    Numerical(String),
    /// Writing outputs failed (exit code 3).
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<dqpt_core::Error> for CliError {
    fn from(e: dqpt_core::Error) -> Self {
        match e {
            dqpt_core::Error::NumericalFailure { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dqpt", version, about = "Quench, Loschmidt-echo and OTOC sweeps for the transverse-field Ising chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: SubCommand,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum SubCommand {
    /// Rate function f(t) per g_f and the analytic critical times
    RateFunction,
    /// Per-mode return probabilities over (k, t/t0)
    Heatmap,
    /// Echo surfaces, coherence spectra and the double-well classification
    Otoc,
    /// Coherence spectra only
    Spectra,
    /// Momentum model against exact diagonalization of the chain
    OracleCompare,
    /// Pulse schedule realizing each mode evolution, with a replay check
    PulseSchedule,
}

impl From<SubCommand> for Command {
    fn from(s: SubCommand) -> Self {
        match s {
            SubCommand::RateFunction => Command::RateFunction,
            SubCommand::Heatmap => Command::Heatmap,
            SubCommand::Otoc => Command::Otoc,
            SubCommand::Spectra => Command::Spectra,
            SubCommand::OracleCompare => Command::OracleCompare,
            SubCommand::PulseSchedule => Command::PulseSchedule,
        }
    }
}

/// Resolves, validates, computes and writes; returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let start = Instant::now();
    let config = match RunConfig::resolve(cli.command.into(), &cli.overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    if let Some(threads) = config.threads {
        // Fails only if a pool already exists, which keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let result = commands::run(&config).and_then(|(artifacts, verdict)| {
        let names = artifacts.names().join(", ");
        artifacts.commit(&config, start.elapsed())?;
        eprintln!("wrote {names} to {}", config.output.dir.display());
        Ok(verdict)
    });
    match result {
        Ok(Verdict::Pass) => 0,
        Ok(Verdict::Fail(msg)) => {
            eprintln!("FAIL: {msg}");
            1
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
