use thiserror::Error;

/// Failures raised by the channel, erasure and Fock-space operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside {allowed}")]
    Domain {
        name: &'static str,
        value: f64,
        allowed: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("not a density operator: {0}")]
    NotDensity(String),

    #[error("not unitary: max |U†U - 1| = {0:e}")]
    NotUnitary(f64),

    #[error("phase weight is not normalized: total mass {0}")]
    Unnormalized(f64),

    #[error("invalid phase weight: {0}")]
    InvalidWeight(String),

    #[error("cos²(λt) = {0} exceeds 1/2, the cosine weight would go negative")]
    Positivity(f64),

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("basis is not orthonormal: max |<b_j|b_k> - δ_jk| = {0:e}")]
    NotOrthonormal(f64),

    #[error("check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
