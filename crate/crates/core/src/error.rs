//! Error types shared across the crate.

use std::fmt;
use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by callers (the CLI) to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// The request itself is invalid (e.g. impurity importance of a linear model).
    Usage,
    /// Input files or data are missing, malformed, or inconsistent.
    Input,
    /// Training or evaluation failed numerically.
    Numeric,
}

#[derive(Debug)]
pub enum Error {
    /// File I/O failure, with the offending path.
    Io { path: PathBuf, source: std::io::Error },
    /// A stats line failed to parse; `line` is 1-based.
    StatsParse { line: usize, msg: String },
    /// File-level stats problem (e.g. unbalanced section delimiters).
    StatsFile { msg: String },
    /// A structured document (JSON) is malformed or has an unsupported schema.
    Doc { path: Option<PathBuf>, msg: String },
    /// Dataset CSV problem; `row` is the 1-based line when known.
    Csv { row: Option<usize>, msg: String },
    /// Invalid stat mapping.
    Mapping { msg: String },
    /// Invalid run manifest.
    Manifest { msg: String },
    /// IPC target extraction failed for one entry.
    Target { entry: String, msg: String },
    /// An operation that needs samples got none.
    EmptyDataset { context: String },
    /// A split produced an empty train or test partition.
    EmptyPartition { which: &'static str, detail: String },
    /// Data violates a documented invariant.
    Data { msg: String },
    /// Model was trained on a different normalization regime than the data.
    RegimeMismatch { model_normalized: bool, data_normalized: bool },
    /// Feature width does not match the model.
    WidthMismatch { expected: usize, got: usize },
    /// Operation requires a different model kind.
    WrongModelKind { expected: &'static str, got: String },
    /// Numeric failure during training or prediction.
    Numeric { msg: String },
    /// Figure rendering failure (empty source, kind/source mismatch).
    Figure { msg: String },
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Numeric { .. } => ErrorCategory::Numeric,
            Error::WrongModelKind { .. } => ErrorCategory::Usage,
            _ => ErrorCategory::Input,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data { msg: msg.into() }
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric { msg: msg.into() }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Io { path, source } => write!(f, "{}: {}", path.display(), source),
            Error::StatsParse { line, msg } => write!(f, "stats line {line}: {msg}"),
            Error::StatsFile { msg } => write!(f, "stats file: {msg}"),
            Error::Doc { path: Some(p), msg } => write!(f, "{}: {}", p.display(), msg),
            Error::Doc { path: None, msg } => write!(f, "document: {msg}"),
            Error::Csv { row: Some(r), msg } => write!(f, "csv row {r}: {msg}"),
            Error::Csv { row: None, msg } => write!(f, "csv: {msg}"),
            Error::Mapping { msg } => write!(f, "mapping: {msg}"),
            Error::Manifest { msg } => write!(f, "manifest: {msg}"),
            Error::Target { entry, msg } => write!(f, "target extraction for {entry}: {msg}"),
            Error::EmptyDataset { context } => write!(f, "no samples: {context}"),
            Error::EmptyPartition { which, detail } => {
                write!(f, "empty {which} partition: {detail}")
            }
            Error::Data { msg } => write!(f, "invalid data: {msg}"),
            Error::RegimeMismatch { model_normalized, data_normalized } => write!(
                f,
                "normalization regime mismatch: model trained with normalized={model_normalized}, \
                 data has normalized={data_normalized}"
            ),
            Error::WidthMismatch { expected, got } => {
                write!(f, "feature width mismatch: model expects {expected}, got {got}")
            }
            Error::WrongModelKind { expected, got } => {
                write!(f, "wrong model kind: operation requires {expected}, model is {got}")
            }
            Error::Numeric { msg } => write!(f, "numeric failure: {msg}"),
            Error::Figure { msg } => write!(f, "figure: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}
