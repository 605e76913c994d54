use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: expected {expected} entries in row {row}, found {found}")]
    NotSquare { row: usize, expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not invertible over the integers (determinant {0})")]
    NotInvertible(BigInt),
    #[error("matrix is not a reflection")]
    NotAReflection,
    #[error("group closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("element is not in the group")]
    NotInGroup,
    #[error("invalid marking: {0}")]
    InvalidMarking(String),
    #[error("invalid root system: {0}")]
    InvalidRootSystem(String),
    #[error("lattice lies outside the integral-form range: {0}")]
    LatticeOutOfRange(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("catalog entry `{0}` is not simply connected")]
    NotSimplyConnected(String),
    #[error("insufficient 2-adic precision: {0}")]
    InsufficientPrecision(String),
    #[error("classification failed: {0}")]
    Classification(String),
    #[error("value does not fit in a machine integer")]
    Overflow,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("internal assertion failed: {0}")]
    Assertion(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
