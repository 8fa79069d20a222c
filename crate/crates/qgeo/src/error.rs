use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qgeo_core::Error),

    #[error("{0}")]
    Usage(String),

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("invalid POVM specification: {0}")]
    Povm(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("could not start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// 2 for anything the user can fix by changing the input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use qgeo_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config { .. } | CliError::Povm(_) => 2,
            CliError::Core(
                E::Domain { .. }
                | E::Constraint { .. }
                | E::Dimension { .. }
                | E::Index { .. }
                | E::InvalidPoint(_)
                | E::InvalidPovm(_)
                | E::Precondition(_)
                | E::Radius(_)
                | E::Step { .. }
                | E::KRange(_)
                | E::Tail { .. }
                | E::Truncation { .. }
                | E::Unknown(_)
                | E::InvalidArgument(_),
            ) => 2,
            _ => 1,
        }
    }
}
