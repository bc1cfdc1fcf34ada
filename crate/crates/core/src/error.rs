use thiserror::Error;

/// Errors raised by the algebra, reduction and parsing layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("pole at u = {at}")]
    Pole { at: String },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("mismatched coefficient algebras: {0}")]
    MismatchedAlgebras(String),

    #[error("odd-parity term {term} cannot be prolonged radially")]
    OddParity { term: String },

    #[error("term {term} has a pole on the constraint surface u = {at}")]
    PoleOnConstraint { term: String, at: String },

    #[error("residual pole at u = {at} after division by J in term {term}")]
    ResidualPole { term: String, at: String },

    #[error("operator series must have the identity as leading term")]
    NonIdentityLeading,

    #[error("input is not homogeneous: {0}")]
    NotHomogeneous(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
