use std::fmt;

/// CLI-level errors carrying their process exit code: configuration
/// problems exit with 2, numerical-consistency failures with 3, anything
/// else with 1.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical consistency failure: {m}"),
            CliError::Failure(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qmoments::Error> for CliError {
    fn from(e: qmoments::Error) -> Self {
        match e {
            qmoments::Error::NumericalConsistency(m) => CliError::Numerical(m),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<String> for CliError {
    fn from(m: String) -> Self {
        CliError::Failure(m)
    }
}

impl From<&str> for CliError {
    fn from(m: &str) -> Self {
        CliError::Failure(m.to_string())
    }
}
