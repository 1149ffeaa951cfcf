use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vector is not future time-like (self product {0})")]
    NotTimeLike(f64),
    #[error("rotation axis is light-like")]
    LightLikeAxis,
    #[error("alignment axis is degenerate (light-like or zero)")]
    DegenerateAxis,
    #[error("arclength {0} is a vertex; the tangent is undefined there")]
    VertexPoint(f64),
    #[error("invalid polygon: {0}")]
    InvalidSpec(String),
    #[error("invalid rational time: {0}")]
    InvalidTime(String),
    #[error("bad discretization: {0}")]
    BadDiscretization(String),
    #[error("length {len} is not divisible by {fold}")]
    NotDivisible { len: usize, fold: usize },
    #[error("need at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("solution blew up at step {step} (t = {t})")]
    BlowUp { step: usize, t: f64 },
    #[error("averaging window for side {0} contains no grid node")]
    EmptyWindow(usize),
    #[error("asymptote angle {measured} does not match polygon angle {expected}")]
    AsymptoteMismatch { measured: f64, expected: f64 },
    #[error("series too short: {len} samples for {n_max} coefficients")]
    TooShort { len: usize, n_max: usize },
    #[error("domain error: {0}")]
    DomainError(String),
}

pub type Result<T> = core::result::Result<T, Error>;
