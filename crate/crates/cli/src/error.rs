use thiserror::Error;

/// Failures of a subcommand, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid input or a violated precondition (exit code 2).
    #[error("{0}")]
    Precondition(String),
    /// A numerical construction or verification failed (exit code 3).
    #[error("{0}")]
    Numerical(String),
    /// Reading or writing a file failed (exit code 4).
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Precondition(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<spincurve::Error> for CliError {
    fn from(e: spincurve::Error) -> Self {
        use spincurve::Error::*;
        let msg = e.to_string();
        match e {
            AmbiguousCell { .. } | LiftJump { .. } | Construction { .. } | Degenerate(_) => {
                CliError::Numerical(msg)
            }
            _ => CliError::Precondition(msg),
        }
    }
}
