use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite image at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("enclosure overflow: {0}")]
    Overflow(&'static str),

    #[error("legacy bounds undefined: {0}")]
    DegenerateLegacy(&'static str),

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("variant 2 requested but u2_hat is not available")]
    MissingU2,

    #[error("lemma hypothesis not met: {0}")]
    HypothesisNotMet(&'static str),

    #[error("cell set exceeds cap of {cap} cells")]
    TooManyCells { cap: usize },

    #[error("closure not reached after {rounds} rounds")]
    NotClosed { rounds: usize },

    #[error("no recurrent cells found")]
    EmptyResult,
}
