use thiserror::Error;

/// Errors raised by the exact algebra and the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("component index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("evaluation at the origin of a function singular there")]
    SingularEvaluation,

    #[error("point at distance {distance:.3e} from the surface is closer than the minimum {min:.3e}")]
    TooCloseToSurface { distance: f64, min: f64 },

    #[error("point is not on the sphere of radius {radius} (|z| = {norm})")]
    NotOnSphere { norm: f64, radius: f64 },

    #[error("invalid quadrature resolution: {0}")]
    InvalidResolution(String),

    #[error("function is not holomorphic")]
    NotHolomorphic,

    #[error("function is not harmonic")]
    NotHarmonic,

    #[error("function is not homogeneous")]
    Inhomogeneous,

    #[error("radial integral diverges (exponent {exponent})")]
    DivergentIntegral { exponent: i64 },

    #[error("Gram matrix is ill-conditioned (condition estimate {condition:.3e} > {threshold:.3e})")]
    IllConditioned { condition: f64, threshold: f64 },

    #[error("non-finite value encountered at node {node}")]
    NonFinite { node: usize },

    #[error("coincident points in kernel evaluation")]
    CoincidentPoints,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
