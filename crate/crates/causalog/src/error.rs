use std::path::PathBuf;

/// Failures while reading files or running a command.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] causalog_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn format_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format { line, msg: msg.into() }
}

/// Attaches a line number to errors from the core parsers.
pub(crate) fn at_line<T>(line: usize, r: causalog_core::Result<T>) -> Result<T> {
    r.map_err(|e| format_err(line, e.to_string()))
}
