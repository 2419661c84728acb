use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An independent-variable index `μ ≥ m`.
    IndependentOutOfRange { index: usize, count: usize },
    /// A dependent-variable id outside the signature.
    DependentOutOfRange { index: usize, count: usize },
    /// Malformed signature (duplicate or empty names, no variables).
    InvalidSignature(String),
    /// Operand shapes do not fit together.
    DimensionMismatch { expected: usize, found: usize },
    /// The operator was required to satisfy `Λ* = -Λ`.
    NotSkewAdjoint,
    /// The operator must be square.
    NotSquare { rows: usize, cols: usize },
    /// Mixed forms of different bidegree cannot be added.
    BidegreeMismatch { left: (usize, usize), right: (usize, usize) },
    /// A form exceeds the supported vertical degree.
    DegreeCap { degree: usize, cap: usize },
    /// A form was evaluated on the wrong number of derivations.
    Arity { expected: usize, found: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::IndependentOutOfRange { index, count } => {
                write!(f, "independent variable index {index} out of range (m = {count})")
            }
            Error::DependentOutOfRange { index, count } => {
                write!(f, "dependent variable index {index} out of range ({count} declared)")
            }
            Error::InvalidSignature(msg) => write!(f, "invalid signature: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotSkewAdjoint => f.write_str("operator is not skew-adjoint"),
            Error::NotSquare { rows, cols } => {
                write!(f, "operator must be square, got {rows}x{cols}")
            }
            Error::BidegreeMismatch { left, right } => write!(
                f,
                "cannot add forms of bidegree ({}, {}) and ({}, {})",
                left.0, left.1, right.0, right.1
            ),
            Error::DegreeCap { degree, cap } => {
                write!(f, "vertical degree {degree} exceeds the cap {cap}")
            }
            Error::Arity { expected, found } => {
                write!(f, "form expects {expected} arguments, got {found}")
            }
        }
    }
}

impl core::error::Error for Error {}
