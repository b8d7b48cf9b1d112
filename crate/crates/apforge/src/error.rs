use std::fmt;

use apforge_core::Error;

/// Failure of a command, tagged with the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad input files, invalid boundary conditions.
    Usage(String),
    NoSolution(String),
    /// Integrator failure, bound violation or failed verification.
    Numerical(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::NoSolution(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::NoSolution(msg) => write!(f, "no solution: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            CliError::Io(e) => write!(f, "io: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::NoSolution { .. } | Error::Unconstrained | Error::DegenerateBranch { .. } => {
                CliError::NoSolution(msg)
            }
            Error::StepUnderflow { .. }
            | Error::TooManySteps { .. }
            | Error::BoundViolation { .. }
            | Error::InconsistentGeometry(_) => CliError::Numerical(msg),
            _ => CliError::Usage(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.into())
        } else {
            CliError::Usage(format!("malformed JSON: {e}"))
        }
    }
}

/// Short machine-readable tag for the staircase status column.
pub fn status_tag(e: &Error) -> &'static str {
    match e {
        Error::NoSolution { .. } | Error::Unconstrained | Error::DegenerateBranch { .. } => "no-solution",
        Error::BoundViolation { .. } => "bound-violation",
        Error::StepUnderflow { .. } | Error::TooManySteps { .. } | Error::InconsistentGeometry(_) => {
            "numerical-failure"
        }
        _ => "invalid-input",
    }
}
