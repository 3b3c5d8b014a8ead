use thiserror::Error;

/// Errors raised while building samples, fitting estimators, or running
/// resampling and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("subject {subject}, stage {stage}: {message}")]
    InvalidRecord {
        subject: String,
        stage: u32,
        message: String,
    },
    #[error("subject {0}: missing censoring time")]
    MissingCensorTime(String),
    #[error("sample contains no subjects")]
    EmptySample,
    #[error("no stage-{stage} data")]
    NoStageData { stage: u32 },
    #[error("estimand unidentifiable at stage {stage}: {detail}")]
    Unidentifiable { stage: u32, detail: String },
    #[error("curves belong to different stages ({0} vs {1})")]
    StageMismatch(u32, u32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{dropped} of {total} bootstrap replicates unidentifiable at t = {t}")]
    TooManyDropped { t: f64, dropped: usize, total: usize },
    #[error("{failed} of {total} Monte Carlo replications failed: {last}")]
    TooManyFailures {
        failed: usize,
        total: usize,
        last: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(subject: &str, stage: u32, message: impl Into<String>) -> Self {
        Error::InvalidRecord {
            subject: subject.to_string(),
            stage,
            message: message.into(),
        }
    }

    pub(crate) fn unidentifiable(stage: u32, detail: impl Into<String>) -> Self {
        Error::Unidentifiable {
            stage,
            detail: detail.into(),
        }
    }

    /// True for errors that mean "this estimand has no support in the data"
    /// as opposed to malformed input.
    pub fn is_unidentifiable(&self) -> bool {
        matches!(self, Error::Unidentifiable { .. } | Error::NoStageData { .. })
    }
}
