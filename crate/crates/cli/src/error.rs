use std::path::PathBuf;

/// Failures while reading or writing the file formats.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("missing column `{0}`")]
    MissingColumn(&'static str),
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("metadata line {line}: {reason}")]
    Metadata { line: usize, reason: String },
    #[error("line {line}: {source}")]
    AtLine {
        line: u64,
        source: softgrasp_core::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] softgrasp_core::Error),
}

pub type Result<T, E = FormatError> = std::result::Result<T, E>;

pub(crate) fn io_error(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> FormatError {
    let path = path.into();
    move |source| FormatError::Io { path, source }
}
