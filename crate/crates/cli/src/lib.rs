//! Command-line driver for `crcconv`.
//!
//! Every subcommand reads a code from `--config` (a `CodeConfig` JSON file),
//! inline flags, or both, with flags taking precedence. Data go to CSV (and a
//! JSON report where the command has one) under `--out`, or CSV to stdout
//! when `--out` is absent. Every file starts with the resolved run record.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::fmt;

pub use args::Cli;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const INCONCLUSIVE: i32 = 3;
    pub const NUMERIC: i32 = 4;
}

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub source: anyhow::Error,
}

impl CliError {
    pub fn config(msg: impl fmt::Display) -> Self {
        CliError {
            code: exit::CONFIG,
            source: anyhow::anyhow!("{msg}"),
        }
    }

    pub fn numeric(msg: impl fmt::Display) -> Self {
        CliError {
            code: exit::NUMERIC,
            source: anyhow::anyhow!("{msg}"),
        }
    }

    pub fn inconclusive(msg: impl fmt::Display) -> Self {
        CliError {
            code: exit::INCONCLUSIVE,
            source: anyhow::anyhow!("{msg}"),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

impl From<crcconv::Error> for CliError {
    fn from(e: crcconv::Error) -> Self {
        use crcconv::Error::*;
        let code = match e {
            Numeric(_) | Truncated(_) => exit::NUMERIC,
            InvalidPolynomial(_)
            | DivisionByZero
            | InvalidCode(_)
            | LengthMismatch { .. }
            | InvalidArgument(_) => exit::CONFIG,
        };
        CliError {
            code,
            source: e.into(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: exit::FAILURE,
            source: e.into(),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError {
            code: exit::FAILURE,
            source: e.into(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError {
            code: exit::FAILURE,
            source: e.into(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match commands::dispatch(&cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
