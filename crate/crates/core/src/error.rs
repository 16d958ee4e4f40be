use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular twist: {0}")]
    SingularTwist(String),
    #[error("base algebras differ")]
    BaseMismatch,
    #[error("malformed base algebra: {0}")]
    MalformedBase(String),
    #[error("not a representation: {0}")]
    NotRepresentation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not a length-one representation up to homotopy: {0}")]
    NotLengthOne(String),
    #[error("differential does not square to zero starting in degree {0}")]
    NotAComplex(usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unsatisfiable: {0}")]
    Unsatisfiable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
