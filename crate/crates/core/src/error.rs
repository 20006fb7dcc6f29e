use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library and the run driver.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input geometry that violates a structural invariant.
    #[error("invalid input: {0}")]
    Validation(String),

    /// A grid or cell index outside the grid.
    #[error("cell index ({i}, {j}) out of range for a {n}x{n} grid")]
    CellOutOfRange { i: usize, j: usize, n: usize },

    /// The grid bounding box does not strictly contain the dilated region.
    #[error("bounding box too small: {0}")]
    BoundingBox(String),

    /// A point within the declared error band of the curve.
    #[error("point ({x}, {y}) lies within epsilon of the curve")]
    Indeterminate { x: f64, y: f64 },

    /// A field without declared analytic derivative data.
    #[error("field `{0}` has no declared analytic curl or divergence")]
    MissingDerivative(String),

    /// A malformed line in a text input.
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn parse(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
