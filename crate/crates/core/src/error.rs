use std::path::PathBuf;

use crate::corpus::ClassId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context} line {line}: {message}")]
    Parse {
        context: String,
        line: usize,
        message: String,
    },

    #[error("label {label} is outside the label domain {domain:?}")]
    LabelOutOfDomain { label: ClassId, domain: Vec<ClassId> },

    #[error("tweet {0} has no label")]
    Unlabeled(String),

    #[error("resource not available: {0}")]
    MissingResource(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid training data: {0}")]
    Training(String),

    #[error("feature id {id} out of range for a space of {dim} features")]
    FeatureOutOfRange { id: u32, dim: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("model file: {0}")]
    Model(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            line,
            message: message.into(),
        }
    }
}
