use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("model has {got} points, {required} required")]
    ModelTooSmall { required: usize, got: usize },
    #[error("unknown solver `{0}`")]
    UnknownSolver(String),
    #[error("unknown outlier mode `{0}`")]
    UnknownOutlierMode(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    pub fn code(&self) -> &'static str {
        match self {
            BenchError::Config(_) => "invalid_config",
            BenchError::Parse { .. } => "parse_error",
            BenchError::ModelTooSmall { .. } => "model_too_small",
            BenchError::UnknownSolver(_) => "unknown_solver",
            BenchError::UnknownOutlierMode(_) => "unknown_outlier_mode",
            BenchError::Io(_) => "io_error",
            BenchError::Csv(_) => "csv_error",
            BenchError::Json(_) => "json_error",
        }
    }
}

pub type BenchResult<T> = std::result::Result<T, BenchError>;
