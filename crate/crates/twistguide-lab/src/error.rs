use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid scenario field `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error(transparent)]
    Core(#[from] twistguide::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("output directory {} is in use (remove {} if no run is active)", .0.display(), .0.join(LOCK_FILE).display())]
    Busy(PathBuf),

    #[error("manifest: {0}")]
    Manifest(String),
}

pub(crate) const LOCK_FILE: &str = ".lock";

pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> LabError {
    let path = path.into();
    move |source| LabError::Io { path, source }
}
