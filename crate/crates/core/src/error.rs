use std::fmt;

/// Crate-wide error type. Variants are deliberately specific so callers (and
/// the CLI) can report the exact failure class.
#[derive(Debug)]
pub enum Error {
    /// A configuration parameter is out of its documented range.
    InvalidParameter(String),
    /// Two inputs that must agree in shape do not.
    DimensionMismatch { expected: usize, got: usize, what: &'static str },
    /// An input that must be non-empty was empty.
    EmptyInput(&'static str),
    /// A feature name or value failed validation.
    InvalidFeature(String),
    /// A numeric input was NaN or infinite where a finite value is required.
    NonFinite(String),
    /// A quantity is undefined for the given inputs (e.g. division by zero).
    Undefined(String),
    /// Malformed input data: row/column context plus a human-readable reason.
    Malformed { row: usize, detail: String },
    /// The schema does not designate a label column but one is required,
    /// or the designated column is missing from the input header.
    MissingLabelColumn(String),
    /// A data row does not have the arity the header promises.
    ArityMismatch { row: usize, expected: usize, got: usize },
    /// The input header and schema do not cover each other exactly.
    SchemaMismatch(String),
    /// Key fingerprint in an encoded file does not match the supplied key.
    KeyMismatch { expected: [u8; 8], got: [u8; 8] },
    /// An encoded file is structurally invalid.
    BadFormat(String),
    /// Labels passed to evaluation contain a class the model never saw.
    UnseenLabel(String),
    /// A sweep grid cell failed; wraps the underlying failure with the cell.
    SweepCell { m: u32, k: u16, source: Box<Error> },
    /// Underlying I/O failure.
    Io(std::io::Error),
    /// CSV-level parse failure.
    Csv(csv::Error),
    /// JSON (de)serialization failure.
    Json(serde_json::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::DimensionMismatch { expected, got, what } => {
                write!(f, "dimension mismatch in {what}: expected {expected}, got {got}")
            }
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
            Error::InvalidFeature(msg) => write!(f, "invalid feature: {msg}"),
            Error::NonFinite(msg) => write!(f, "non-finite value: {msg}"),
            Error::Undefined(msg) => write!(f, "undefined quantity: {msg}"),
            Error::Malformed { row, detail } => write!(f, "malformed input at row {row}: {detail}"),
            Error::MissingLabelColumn(msg) => write!(f, "missing label column: {msg}"),
            Error::ArityMismatch { row, expected, got } => {
                write!(f, "row {row} has {got} fields, header has {expected}")
            }
            Error::SchemaMismatch(msg) => write!(f, "schema mismatch: {msg}"),
            Error::KeyMismatch { expected, got } => write!(
                f,
                "key fingerprint mismatch: file has {}, key derives {}",
                hex8(expected),
                hex8(got)
            ),
            Error::BadFormat(msg) => write!(f, "bad encoded file: {msg}"),
            Error::UnseenLabel(label) => write!(f, "label {label:?} was not in the training set"),
            Error::SweepCell { m, k, source } => {
                write!(f, "sweep cell (m={m}, k={k}) failed: {source}")
            }
            Error::Io(e) => write!(f, "i/o error: {e}"),
            Error::Csv(e) => write!(f, "csv error: {e}"),
            Error::Json(e) => write!(f, "json error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            Error::Csv(e) => Some(e),
            Error::Json(e) => Some(e),
            Error::SweepCell { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}

fn hex8(bytes: &[u8; 8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Convenient alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
