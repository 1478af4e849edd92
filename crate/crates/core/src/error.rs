use thiserror::Error;

/// Errors raised by the lattice, monoid and curve routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not a face: {0}")]
    NotAFace(String),
    #[error("undetermined type entry: {0}")]
    Undetermined(String),
    #[error("no solution: {0}")]
    Infeasible(String),
    #[error("enumeration cap of {0} candidates exceeded")]
    CapExceeded(usize),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
