//! Command-line front end and file formats for the certification pipeline:
//! CSV datasets, JSON artifacts (problems, solutions, learnt functions,
//! certificates, reports), SVG plots, and an external-solver bridge.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod external;
pub mod plot;

use thiserror::Error;

/// Exit-code contract shared by every command: 0 success, 1 config/IO,
/// 2 certification or verification failure, 3 covering failure,
/// 4 sequential stage failure.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NOT_CERTIFIED: i32 = 2;
pub const EXIT_COVERING: i32 = 3;
pub const EXIT_STAGE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("dataset parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid Lipschitz bound M: {0}")]
    InvalidM(f64),
    #[error("config error: {0}")]
    Config(String),
    #[error("no external solver registered under '{0}'")]
    NotRegistered(String),
    #[error("external solver failed: {0}")]
    ExternalSolverFailure(String),
    #[error("{0}")]
    Core(String),
}

impl CliError {
    /// Exit code for errors that abort a command before it produces a verdict.
    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG
    }
}
