use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Input { line: u64, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error("unknown table `{0}` (expected one of t1, t2, perm1, perm2, app_var, power_p07)")]
    UnknownTable(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] wmw_core::Error),
    #[error("writing output: {0}")]
    Output(String),
}

impl CliError {
    /// Process exit code: 3 when the data are too small for a requested
    /// test, 1 for output failures and 2 for any other bad input.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(wmw_core::Error::SizeTooSmall { .. }) => 3,
            CliError::Output(_) => 1,
            _ => 2,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
