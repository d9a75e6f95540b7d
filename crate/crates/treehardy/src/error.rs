use thiserror::Error;

/// Errors produced by tree construction, norm computation, and operator
/// analysis. Parse errors carry the 1-based line number of the offending
/// input line.
#[derive(Debug, Error)]
pub enum Error {
    #[error("homogeneous tree degree must be at least 2 (got {0})")]
    InvalidDegree(u64),

    #[error("level size overflows a 64-bit integer at level {level}")]
    Overflow { level: usize },

    #[error("invalid tree structure at level {level}, index {index}: {reason}")]
    Structure {
        level: usize,
        index: usize,
        reason: String,
    },

    #[error("level {level} out of range: tree is truncated at depth {depth}")]
    LevelRange { level: usize, depth: usize },

    #[error("vertex ({level}, {index}) is not materialized in this tree")]
    VertexRange { level: usize, index: usize },

    #[error("values at level {level} have length {got}, expected {expected}")]
    ValueShape {
        level: usize,
        got: usize,
        expected: usize,
    },

    #[error("operation requires a finite exponent")]
    UnsupportedExponent,

    #[error("exponents out of order: {requirement}")]
    ExponentOrder { requirement: &'static str },

    #[error("invalid exponent `{0}`: expected a positive number or `inf`")]
    InvalidExponent(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("window must be at least 1")]
    InvalidWindow,

    #[error("functions are defined on different trees")]
    TreeMismatch,

    #[error("degenerate witness at level {level}: symbol vanishes on the whole level")]
    DegenerateWitness { level: usize },

    #[error("input function is identically zero")]
    DegenerateInput,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn structure(level: usize, index: usize, reason: impl Into<String>) -> Self {
        Error::Structure {
            level,
            index,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
