//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed tag {text:?}: {reason}")]
    MalformedTag { text: String, reason: &'static str },

    #[error("malformed tag pattern {text:?}: {reason}")]
    MalformedPattern { text: String, reason: &'static str },

    #[error("a genotype must contain at least one tag")]
    EmptyGenotype,

    #[error("{source_name}:{line}: {message}")]
    LexiconParse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{source_name}:{line}: {message}")]
    RuleParse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{source_name}:{line}: {message}")]
    TagsetParse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{source_name}:{line}: {message}")]
    TrainingData {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{source_name}:{line}: {message}")]
    ModelFormat {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("invalid counts (f={f}, n={n}): {reason}")]
    InvalidCounts { f: u64, n: u64, reason: &'static str },

    #[error("invalid schedule {text:?}: {message}")]
    Schedule { text: String, message: String },

    #[error("step {step} requires a {resource}, but none was loaded")]
    MissingResource { step: String, resource: &'static str },

    #[error("token streams diverge at token {index}: gold {gold:?} vs system {system:?}")]
    Alignment {
        index: usize,
        gold: String,
        system: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
