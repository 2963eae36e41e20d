//! Configuration parsing, experiment orchestration, and emission for the
//! `veselova` command-line tool. The binary in `main.rs` is a thin
//! argument-parsing shell over this library, which keeps every piece
//! testable in-process.

pub mod config;
pub mod emit;
pub mod preset_configs;
pub mod report;
pub mod run;
pub mod verify;

use std::fmt;

/// Process-level failure classes, each with a fixed exit code:
/// usage errors exit 1, numeric failures exit 2, invariant violations
/// exit 3 (success is 0).
#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or configuration: malformed TOML, violated config
    /// invariants, subcommand/mode mismatch, unwritable output paths.
    Usage(String),
    /// The requested computation failed numerically: integration drift
    /// guard tripped, singular system, state outside its space.
    Numeric(String),
    /// The computation ran but a checked invariant failed: a verify check
    /// out of tolerance, or a spectrum preset missing its documented
    /// torus dimension.
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violation: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<veselova::Error> for CliError {
    fn from(e: veselova::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
