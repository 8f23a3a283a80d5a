use std::fmt;

use hessian_walk::Error;

/// Exit status for bad flags, unreadable inputs and invalid problems.
pub const EXIT_CONFIG: u8 = 2;
/// Exit status for numerical aborts.
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    /// Any failure while reading or validating inputs.
    pub fn input(context: &str, e: impl fmt::Display) -> Self {
        CliError::Config(format!("{context}: {e}"))
    }

    /// A library error raised while computing, classified by kind.
    pub fn compute(context: &str, e: Error) -> Self {
        let msg = format!("{context}: {e}");
        match e {
            Error::InvalidInput(_)
            | Error::DimensionMismatch { .. }
            | Error::Parse(_)
            | Error::RankDeficient { .. }
            | Error::NotInterior { .. }
            | Error::TooFewSamples { .. }
            | Error::Unbounded => CliError::Config(msg),
            _ => CliError::Numerical(msg),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical abort: {m}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
