use thiserror::Error;

use crate::expr::ParseError;

/// Failure of an evaluation because some denominator was not a unit.
///
/// `subexpr` is the pretty-printed denominator expression and `value` the
/// serialized ring element it evaluated to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainWitness {
    pub subexpr: String,
    pub value: String,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("operands belong to different rings ({left} vs {right})")]
    OwnerMismatch { left: String, right: String },
    #[error("element is not invertible")]
    NotInvertible,
    #[error("non-singular parameters required: {0}")]
    NonsingularRequired(String),
    #[error("point outside the domain: denominator `{}` evaluates to {}", .0.subexpr, .0.value)]
    Domain(DomainWitness),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("exact field required: {0}")]
    ExactRingRequired(String),
    #[error("invalid ring descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("invalid ring element `{text}` for {ring}")]
    InvalidElement { text: String, ring: String },
    #[error("order {order} outside supported range {min}..={max}")]
    OrderOutOfRange { order: usize, min: usize, max: usize },
    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
}

impl Error {
    /// Short machine-readable name used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OwnerMismatch { .. } => "OwnerMismatch",
            Error::NotInvertible => "NotInvertible",
            Error::NonsingularRequired(_) => "NonsingularRequired",
            Error::Domain(_) => "DomainError",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::LengthMismatch(_) => "LengthMismatch",
            Error::Parse(_) => "ParseError",
            Error::ExactRingRequired(_) => "ExactRingRequired",
            Error::InvalidDescriptor(_) => "InvalidDescriptor",
            Error::InvalidElement { .. } => "InvalidElement",
            Error::OrderOutOfRange { .. } => "OrderOutOfRange",
            Error::UnknownSuite(_) => "UnknownSuite",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
