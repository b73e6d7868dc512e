use crate::expr::ExprError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid index: {0}")]
    Index(String),
    #[error("metric is not positive definite at {point:?}")]
    MetricNotPositive { point: Vec<f64> },
    #[error("metric is not symmetric at {point:?} (residual {residual:e})")]
    MetricNotSymmetric { point: Vec<f64>, residual: f64 },
    #[error("metric is singular at {point:?}")]
    SingularMetric { point: Vec<f64> },
    #[error("no closed-form inverse for a non-constant {dim}x{dim} metric; use a pointwise solve")]
    NoSymbolicInverse { dim: usize },
    #[error("projector is not idempotent at {point:?} (residual {residual:e})")]
    NotIdempotent { point: Vec<f64>, residual: f64 },
    #[error("section is not a spray: {0}")]
    NotASpray(String),
    #[error("family is rank deficient at {point:?}: rank {rank} of {expected}")]
    RankDeficient { point: Vec<f64>, rank: usize, expected: usize },
    #[error("bundle map is not a fiberwise isomorphism at {point:?}")]
    NotIsomorphism { point: Vec<f64> },
    #[error("integration diverged at t = {t}")]
    Diverged { t: f64 },
    #[error("{dropped} of {total} sampled trajectories diverged")]
    TooManyDiverged { dropped: usize, total: usize },
    #[error("trajectory has {0} points; at least 3 are needed")]
    TrajectoryTooShort(usize),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
