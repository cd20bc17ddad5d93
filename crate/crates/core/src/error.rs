use std::path::PathBuf;

use crate::translator::TranslateError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate vector: {0}")]
    DegenerateVector(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("invalid sentence: {0}")]
    InvalidSentence(String),

    #[error("invalid translation: {0}")]
    InvalidTranslation(String),

    #[error("tagger failure: {0}")]
    Tagger(String),

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("map-back unavailable: {0}")]
    MapBackUnavailable(String),

    #[error("grey-box ranking unavailable: {0}")]
    GreyBoxUnavailable(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Translate(#[from] TranslateError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
