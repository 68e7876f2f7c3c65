use thiserror::Error;

/// Errors produced by the physics kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },

    #[error("frequency must be positive and finite, got {0}")]
    NonPositiveFrequency(f64),

    #[error("distance must be positive and finite, got {0}")]
    NonPositiveDistance(f64),

    #[error("tabulated spectrum: {0}")]
    Spectrum(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),

    #[error("point lies outside the validity window of the requested limit: {0}")]
    OutsideWindow(&'static str),

    #[error(
        "dc-transport material used at D = {distance:e} below its validity bound {bound:e} \
         (set allow_dc_short_distance to override)"
    )]
    DcOutOfValidity { distance: f64, bound: f64 },

    #[error(
        "det(1 - R_A R_B e^(-u)) vanishes or changes sign on the integration domain; \
         the magneto-optical response is too strong for this integrand"
    )]
    SingularKernel,

    #[error("frequency integral diverges: {0}")]
    Divergent(&'static str),

    #[error("unsupported combination: {0}")]
    Unsupported(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
