use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("trace aborted: {failed} of {total} angles failed")]
    TraceAbort { failed: usize, total: usize },
    #[error("verification failed: {failed} of {total} checks did not pass")]
    Oracle { failed: usize, total: usize },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Internal(String),
}

/// Machine-readable error written to standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorPayload {
    pub error: &'static str,
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::TraceAbort { .. } => 3,
            CliError::Oracle { .. } => 4,
            CliError::Io(_) | CliError::Internal(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::TraceAbort { .. } => "trace-abort",
            CliError::Oracle { .. } => "oracle-failure",
            CliError::Io(_) => "io",
            CliError::Internal(_) => "internal",
        }
    }

    pub fn payload(&self) -> ErrorPayload {
        ErrorPayload {
            error: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
        }
    }

    pub fn payload_json(&self) -> String {
        serde_json::to_string(&self.payload()).expect("payload serializes")
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
