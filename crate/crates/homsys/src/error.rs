use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("quiver/field mismatch: {0}")]
    Mismatch(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("quiver is not acyclic: {0}")]
    Cyclic(String),
    #[error("multiplicity system has no admissible solution: {0}")]
    Multiplicity(String),
    #[error("decomposition could not be certified over this field: {0}")]
    Indeterminate(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
