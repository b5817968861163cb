use thiserror::Error;

use crate::analysis::MaximaTrack;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial degree {degree} exceeds the configured cap of {cap}")]
    ResourceLimit { degree: u128, cap: u64 },

    #[error("power t^{power} is not a multiple of {period}; substitution would not be smooth")]
    NonSmoothSubstitution { power: u32, period: u32 },

    #[error("integrand has nonzero total integral; no Gaussian-weighted polynomial antiderivative exists")]
    NotElementary,

    #[error("iterated antiderivative of order {j} requested, but only orders below {moments_r} are Schwartz")]
    OrderTooHigh { j: usize, moments_r: usize },

    #[error("x2 = {x2} lies outside the curve domain ({lo}, {hi})")]
    DomainError { x2: f64, lo: f64, hi: f64 },

    #[error("quadrature did not reach tolerance after {subdivisions} subdivisions (error estimate {error_estimate:e})")]
    QuadratureFailure {
        subdivisions: usize,
        error_estimate: f64,
    },

    #[error("no decay-rate case applies: {0}")]
    InvalidCase(String),

    #[error("scale row {row} is identically zero")]
    DegenerateRow { row: usize },

    #[error("maxima track lost at scale index {scale_index}{}", stage.map(|s| format!(" (stage {s})")).unwrap_or_default())]
    TrackLost {
        stage: Option<usize>,
        scale_index: usize,
        partial: Box<MaximaTrack>,
    },

    #[error("magnitude at fit index {index} is not positive")]
    NonPositiveMagnitude { index: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
