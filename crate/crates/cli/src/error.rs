use thiserror::Error;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<plp_core::Error> for CliError {
    fn from(e: plp_core::Error) -> Self {
        use plp_core::Error as E;
        match e {
            E::Domain(_) | E::Config(_) => CliError::Input(e.to_string()),
            E::Estimation(_) | E::Quadrature { .. } | E::Degenerate(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
