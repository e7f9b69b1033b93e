//! Command-line front end, file formats and property self-tests for
//! [`divpair_core`].

pub mod cli;
pub mod config;
pub mod gen;
pub mod report;
pub mod selftest;
pub mod tolerance;

/// Errors surfaced by the command line, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed input text or flags (exit code 2).
    #[error("parse error: {0}")]
    Parse(String),
    /// A mathematical precondition failed (exit code 3).
    #[error("{0}")]
    Domain(divpair_core::Error),
}

impl From<divpair_core::Error> for CliError {
    fn from(e: divpair_core::Error) -> Self {
        match e {
            divpair_core::Error::Parse(msg) => CliError::Parse(msg),
            other => CliError::Domain(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}
