use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WphError {
    #[error("point {point} lies outside the usable interior of the {chart} chart")]
    Domain { chart: &'static str, point: String },

    #[error("curve is not a model geodesic of this chart: {0}")]
    UnsupportedGeodesic(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("integral does not converge: {0}")]
    Divergence(String),

    #[error("radial problem is ill-conditioned: {0}")]
    Conditioning(String),

    #[error("cannot fit: {0}")]
    Fit(String),

    #[error("grid too coarse: {0}")]
    Resolution(String),

    #[error("truncated integral is not converged: {0}")]
    Truncation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, WphError>;
