use std::path::PathBuf;

use crate::corpus::Language;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Corpus { line: usize, message: String },

    #[error("{language} parse error at {row}:{column}: {message}")]
    Parse {
        language: Language,
        row: usize,
        column: usize,
        message: String,
    },

    #[error("{language}: {message}")]
    Definition { language: Language, message: String },

    #[error("provider {provider}: {message}")]
    Provider { provider: String, message: String },

    #[error("model: {0}")]
    Model(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn provider(provider: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Provider {
            provider: provider.into(),
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
