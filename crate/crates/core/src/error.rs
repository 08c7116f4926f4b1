use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("resource limit: {requested} amplitudes requested, cap is {cap}")]
    ResourceLimit { requested: u128, cap: usize },
    #[error("tensor is not injective: rank {rank} < {required}")]
    NotInjective { rank: usize, required: usize },
    #[error("MPS is not normal: {0}")]
    NotNormal(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("theorems inapplicable: N = {n} is below the minimal size {min_n}")]
    TheoremsInapplicable { n: usize, min_n: usize },
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error("no witness: {0}")]
    NoWitness(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
