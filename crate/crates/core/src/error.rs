use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("probability at index {index} is not strictly positive ({value})")]
    NonPositiveProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, expected 1 within 1e-12")]
    ProbSumMismatch { sum: f64 },
    #[error("cost at index {index} is not finite ({value})")]
    NonFiniteCost { index: usize, value: f64 },
    #[error("length mismatch: {costs} costs vs {probs} probabilities")]
    LengthMismatch { costs: usize, probs: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("kappa = n(1-alpha) = {kappa} must lie in (0, {n})")]
    KappaOutOfRange { kappa: f64, n: usize },
    #[error("epsilon {eps} outside the admissible range [{lo}, {hi}]")]
    EpsOutOfRange { eps: f64, lo: f64, hi: f64 },
    #[error("could not bracket the multiplier root in [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("transport ratio is unbounded at support point {index}")]
    UnboundedRatio { index: usize },
    #[error("quotient sequence is not monotone at position {position}")]
    NonMonotoneEstimates { position: usize, estimates: Vec<f64> },
    #[error("grid step {step} is coarser than min(p)/4 = {limit}")]
    ResolutionTooCoarse { step: f64, limit: f64 },
    #[error("no convergence after {iterations} iterations (gradient norm {grad_norm})")]
    NonConvergence { iterations: usize, grad_norm: f64 },
}

impl Error {
    /// Stable identifier used in machine-readable error payloads.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyInput(_) => "EmptyInput",
            Error::NonPositiveProbability { .. } => "NonPositiveProbability",
            Error::ProbSumMismatch { .. } => "ProbSumMismatch",
            Error::NonFiniteCost { .. } => "NonFiniteCost",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::KappaOutOfRange { .. } => "KappaOutOfRange",
            Error::EpsOutOfRange { .. } => "EpsOutOfRange",
            Error::NoBracket { .. } => "NoBracket",
            Error::UnboundedRatio { .. } => "UnboundedRatio",
            Error::NonMonotoneEstimates { .. } => "NonMonotoneEstimates",
            Error::ResolutionTooCoarse { .. } => "ResolutionTooCoarse",
            Error::NonConvergence { .. } => "NonConvergence",
        }
    }
}
