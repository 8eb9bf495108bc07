use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const DATA: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: file not found")]
    MissingFile { path: PathBuf },
    #[error("{path}: file is empty")]
    EmptyFile { path: PathBuf },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{context}: {source}")]
    Model {
        context: String,
        #[source]
        source: hpi_core::Error,
    },
    #[error(transparent)]
    Core(#[from] hpi_core::Error),
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Error::Config(message.into())
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        match self {
            Error::Core(source) => Error::Model {
                context: context.into(),
                source,
            },
            other => other,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::MissingFile { .. } => exit::USAGE,
            Error::EmptyFile { .. } | Error::Parse { .. } | Error::Io { .. } | Error::Format { .. } => exit::DATA,
            Error::Core(e) | Error::Model { source: e, .. } => core_exit_code(e),
        }
    }
}

fn core_exit_code(e: &hpi_core::Error) -> i32 {
    use hpi_core::Error as E;
    match e {
        E::InvalidSpec(_)
        | E::UnknownSpec { .. }
        | E::UnknownIndicator(_)
        | E::InvalidParameter(_)
        | E::FeatureMismatch { .. }
        | E::GridTooLarge { .. }
        | E::MissingExogenous { .. } => exit::USAGE,
        E::LengthMismatch { .. }
        | E::EmptyInput
        | E::DimensionMismatch { .. }
        | E::DegenerateRange
        | E::RankDeficient { .. }
        | E::Singular => exit::NUMERICAL,
        _ => exit::DATA,
    }
}
