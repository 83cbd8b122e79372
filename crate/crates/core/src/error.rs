use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration violates a precondition (mesh, coefficients, scheme).
    #[error("configuration error: {0}")]
    Config(String),

    /// A per-step linear system could not be factored.
    #[error("singular system at step {step}: {detail}")]
    Singular { step: usize, detail: String },

    /// A value overflows or the evaluator has no supported algorithm for it.
    #[error("out of supported range: {0}")]
    Range(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}
