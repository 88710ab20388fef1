use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures reported by the container, raster and manifest parsers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("unrecognized file magic")]
    BadMagic,
    #[error("unsupported array container version {major}.{minor} (only 1.0 is accepted)")]
    UnsupportedVersion { major: u8, minor: u8 },
    #[error("malformed array header: {0}")]
    BadHeader(String),
    #[error("unsupported dtype `{0}`")]
    UnsupportedDtype(String),
    #[error("fortran-ordered arrays are not supported")]
    FortranOrder,
    #[error("arrays with {0} dimensions are not supported (1 to 3 allowed)")]
    TooManyDims(usize),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("payload has {extra} trailing bytes beyond the declared shape")]
    TrailingBytes { extra: usize },
    #[error("unsupported raster: {0}")]
    UnsupportedRaster(String),
    #[error("line {line}: {message}")]
    Line { line: u64, message: String },
    #[error("malformed JSON: {0}")]
    Json(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("inverse transform is not real: imaginary residue {residue:e} exceeds tolerance for real magnitude {real:e}")]
    NonRealResult { residue: f64, real: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("class `{0}` has no samples")]
    EmptyClass(String),
    #[error("degenerate class set: {0}")]
    DegenerateClassSet(String),
    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("parse error: {0}")]
    Format(#[from] FormatError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attaches the offending file to an error raised while decoding it.
    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        match self {
            e @ (Error::Io { .. } | Error::File { .. }) => e,
            e => Error::File {
                path: path.into(),
                source: Box::new(e),
            },
        }
    }

    /// True for I/O and decoding failures, false for validation-type errors.
    pub fn is_io_or_parse(&self) -> bool {
        match self {
            Error::Format(_) | Error::Io { .. } => true,
            Error::File { source, .. } => source.is_io_or_parse(),
            _ => false,
        }
    }
}
