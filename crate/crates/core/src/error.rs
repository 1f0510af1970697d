use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("insufficient precision: {0}")]
    Precision(String),

    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("argument outside the disk of convergence: {0}")]
    OutOfDisk(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("not invertible: {0}")]
    NotInvertible(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}
