use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field descriptor `{0}`")]
    BadDescriptor(String),
    #[error("{0} is not a squarefree integer other than 0 and 1")]
    NotSquarefree(i64),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("t = {t} does not exceed the threshold t0 = {t0}")]
    BelowThreshold { t: f64, t0: f64 },
    #[error("element is zero")]
    ZeroElement,
    #[error("matrix is rank deficient")]
    RankDeficient,
    #[error("dimension {got} exceeds the limit {limit}")]
    DimensionTooLarge { got: usize, limit: usize },
    #[error("divergent zeta argument s = {0} (need s > 1)")]
    ZetaDivergent(f64),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
