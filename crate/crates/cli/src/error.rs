//! Harness errors and their process exit codes: 2 for input and schema
//! problems, 3 when a requested size exceeds the simulator's resource cap.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("test sample {index}: {source}")]
    Sample {
        index: usize,
        source: qloc_core::Error,
    },
    #[error(transparent)]
    Core(#[from] qloc_core::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        let core = match self {
            HarnessError::Core(e) => Some(e),
            HarnessError::Sample { source, .. } => Some(source),
            _ => None,
        };
        match core {
            Some(qloc_core::Error::QubitCapExceeded { .. }) => 3,
            _ => 2,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
