use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("second moment estimate diverges: {0}")]
    MomentDivergence(String),
    #[error("non-finite integrand value at node {node:?}")]
    NonFiniteIntegrand { node: Vec<f64> },
    #[error("equal-measure split failed: {0}")]
    SplitFailure(String),
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    EigenConvergence { sweeps: usize, residual: f64 },
    #[error("basis construction ill-conditioned: {0}")]
    IllConditionedBasis(String),
    #[error("bracket [{lo}, {hi}] does not change sign: delta({lo}) = {f_lo:e}, delta({hi}) = {f_hi:e}")]
    BracketError { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
