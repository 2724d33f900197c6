use std::path::PathBuf;

use thiserror::Error;

/// Exit status for invalid input.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit status for a singular or otherwise failed solve.
pub const EXIT_SOLVER: i32 = 3;
/// Exit status when the infinite-chain truncation does not converge.
pub const EXIT_TRUNCATION: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(#[from] clap::Error),
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("line {line}: expected 'key = value', got '{text}'")]
    Syntax { line: usize, text: String },
    #[error("bad value '{value}' for {key}: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("'{key}' does not apply to '{command}'")]
    Irrelevant {
        key: &'static str,
        command: &'static str,
    },
    #[error("missing required setting '{0}'")]
    Missing(&'static str),
    #[error("{key} = {value} is negative or not finite; rates must be >= 0")]
    NegativeRate { key: &'static str, value: f64 },
    #[error("{key} = {site} is not a site of a {n}-site system (sites are 1..={n})")]
    InvalidSite {
        key: &'static str,
        site: usize,
        n: usize,
    },
    #[error("trap and initial site coincide (site {0})")]
    CoincidentSites(usize),
    #[error("invalid {key}: {reason}")]
    InvalidValue { key: &'static str, reason: String },
    #[error("{context}: {source}")]
    Solver {
        context: String,
        source: enaqt_core::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("writing output: {0}")]
    Format(String),
}

impl CliError {
    /// Short machine-readable tag; one per validation rule.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::UnknownKey(_) => "unknown-key",
            CliError::Syntax { .. } => "syntax",
            CliError::BadValue { .. } => "bad-value",
            CliError::Irrelevant { .. } => "irrelevant-key",
            CliError::Missing(_) => "missing-key",
            CliError::NegativeRate { .. } => "negative-rate",
            CliError::InvalidSite { .. } => "invalid-site",
            CliError::CoincidentSites(_) => "coincident-sites",
            CliError::InvalidValue { .. } => "invalid-value",
            CliError::Solver { .. } => match self.exit_code() {
                EXIT_TRUNCATION => "truncation",
                EXIT_VALIDATION => "invalid-input",
                _ => "solver",
            },
            CliError::Io { .. } | CliError::Format(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) if !e.use_stderr() => 0,
            CliError::Solver { source, .. } => match source.root() {
                enaqt_core::Error::Truncation { .. } => EXIT_TRUNCATION,
                enaqt_core::Error::InvalidSize { .. }
                | enaqt_core::Error::InvalidRate { .. }
                | enaqt_core::Error::InvalidSite { .. }
                | enaqt_core::Error::CoincidentSites { .. }
                | enaqt_core::Error::InvalidParameter { .. }
                | enaqt_core::Error::DegenerateInput(_)
                | enaqt_core::Error::SymmetryViolation(_) => EXIT_VALIDATION,
                _ => EXIT_SOLVER,
            },
            CliError::Io { .. } | CliError::Format(_) => EXIT_IO,
            _ => EXIT_VALIDATION,
        }
    }
}
