use std::fmt;

use thiserror::Error;

/// Row/column pair used in shape diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape(pub usize, pub usize);

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.0, self.1)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left} vs {right}")]
    Shape {
        op: &'static str,
        left: Shape,
        right: Shape,
    },

    #[error("{0}")]
    InvalidShape(String),

    #[error("value {value} at ({row}, {col}) outside [0, 1] in {op}")]
    Domain {
        op: &'static str,
        row: usize,
        col: usize,
        value: f32,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("target codec: {0}")]
    Codec(String),

    #[error("training diverged at epoch {epoch} (mse = {mse})")]
    Diverged { epoch: usize, mse: f32 },

    #[error("linear fit: {0}")]
    Fit(String),

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("pose ({x}, {y}) is outside the world bounds")]
    OutOfWorld { x: f64, y: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
