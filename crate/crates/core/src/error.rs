use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("width {0} is out of range (supported: 1..=16)")]
    InvalidWidth(usize),

    #[error("width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },

    #[error("value {value} does not fit in {width} bits")]
    ValueOutOfRange { value: u32, width: usize },

    #[error("line {line} is out of range for width {width}")]
    LineOutOfRange { line: usize, width: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("not reversible: {0}")]
    NotReversible(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("gate cap of {cap} exceeded while synthesizing")]
    GateCapExceeded { cap: usize },

    #[error("width {0} is not supported here (maximum is 3)")]
    UnsupportedWidth(usize),

    #[error("template rejected: {0}")]
    InvalidTemplate(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Shift the line number of a parse error, used when a gate is parsed as
    /// part of a larger file.
    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            Error::Parse {
                column, message, ..
            } => Error::Parse {
                line,
                column,
                message,
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
