use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;
use vocra_bench::BenchError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{0}")]
    Solver(#[from] vocra::Error),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Bench(#[from] BenchError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Invalid(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Bench(e) => match e {
                BenchError::Io(_) | BenchError::Csv(_) | BenchError::Json(_) => 4,
                _ => 2,
            },
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse_error",
            CliError::Solver(e) => e.code(),
            CliError::Io { .. } => "io_error",
            CliError::Invalid(_) => "invalid_argument",
            CliError::Bench(e) => e.code(),
        }
    }

    /// One-line JSON object for stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "error": self.code(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        if let CliError::Parse { line, path, .. } = self {
            v["line"] = json!(line);
            v["path"] = json!(path.display().to_string());
        }
        v
    }
}

pub type CliResult<T> = Result<T, CliError>;
