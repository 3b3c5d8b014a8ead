use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Parse(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] gaptime::Error),
}

pub type CliResult<T> = Result<T, CliError>;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_UNIDENTIFIABLE: i32 = 4;
pub const EXIT_IO: i32 = 5;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        use gaptime::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config(_) => EXIT_USAGE,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Core(e) => match e {
                E::InvalidRecord { .. } | E::MissingCensorTime(_) | E::EmptySample => EXIT_PARSE,
                E::NoStageData { .. }
                | E::Unidentifiable { .. }
                | E::TooManyDropped { .. }
                | E::TooManyFailures { .. } => EXIT_UNIDENTIFIABLE,
                E::InvalidArgument(_) | E::StageMismatch(..) => EXIT_USAGE,
            },
        }
    }
}

/// Errors that concern a single requested estimand rather than the run.
pub fn is_per_target(e: &gaptime::Error) -> bool {
    e.is_unidentifiable() || matches!(e, gaptime::Error::TooManyDropped { .. })
}
