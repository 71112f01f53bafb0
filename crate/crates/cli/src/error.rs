use std::fmt;
use std::process::ExitCode;

/// Failure of a CLI run, split by the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Rejected before any computation started.
    Config(String),
    /// A numerical routine failed or produced a non-finite value.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Config(_) => ExitCode::from(2),
            Self::Numerical(_) => ExitCode::from(3),
        }
    }

    pub fn config(e: impl fmt::Display) -> Self {
        Self::Config(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(m) => write!(f, "configuration error: {m}"),
            Self::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<varcaputo::Error> for CliError {
    fn from(e: varcaputo::Error) -> Self {
        Self::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Numerical(format!("cannot write output: {e}"))
    }
}
