use std::path::PathBuf;

use thiserror::Error;

/// Problems found while reading one of the pipe-separated file formats.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("missing header line")]
    MissingHeader,
    #[error("unknown column `{0}` in header")]
    UnknownColumn(String),
    #[error("duplicate column `{0}` in header")]
    DuplicateColumn(String),
    #[error("no hourly rows")]
    NoRows,
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: non-numeric value `{token}` in column {column}")]
    NonNumeric {
        line: usize,
        column: String,
        token: String,
    },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("record has {rows} hourly rows, more than the {limit} allowed")]
    TooLong { rows: usize, limit: usize },
    #[error("line {line}: label must be 0 or 1, found `{token}`")]
    BadLabel { line: usize, token: String },
    #[error("line {line}: probability must be in [0, 1] or NaN, found `{token}`")]
    BadProbability { line: usize, token: String },
    #[error("line {line}: unknown event kind `{kind}`")]
    UnknownEvent { line: usize, kind: String },
}

/// Errors raised while loading files or directories from disk.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
    #[error("{path}: {message}")]
    Layout { path: PathBuf, message: String },
}

impl LoadError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LoadError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, source: FormatError) -> Self {
        LoadError::Format {
            path: path.into(),
            source,
        }
    }
}

/// Raised when a bundle lacks streams for some (algorithm, patient) pairs,
/// or a stream's length disagrees with the record it is paired with.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverageError {
    #[error("missing predictions for {}", format_pairs(.0))]
    Missing(Vec<(String, String)>),
    #[error("stream {algorithm}/{patient} has {found} hours, record has {expected}")]
    LengthMismatch {
        algorithm: String,
        patient: String,
        expected: usize,
        found: usize,
    },
}

fn format_pairs(pairs: &[(String, String)]) -> String {
    const SHOWN: usize = 10;
    let mut out = pairs
        .iter()
        .take(SHOWN)
        .map(|(a, p)| format!("{a}/{p}"))
        .collect::<Vec<_>>()
        .join(", ");
    if pairs.len() > SHOWN {
        out.push_str(&format!(" and {} more", pairs.len() - SHOWN));
    }
    out
}
