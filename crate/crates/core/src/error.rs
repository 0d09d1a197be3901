use thiserror::Error;

/// Errors raised by the geometry kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("invalid radius {0}: radii must be positive and finite")]
    InvalidRadius(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("radius {lambda} is below the circumradius {lambda_k}")]
    RadiusTooSmall { lambda: f64, lambda_k: f64 },

    #[error("p outside admitted strictly convex range [1.001, 64] (got p = {0})")]
    ExponentOutOfRange(f64),

    #[error("linear image matrix is singular or not finite")]
    SingularMatrix,

    #[error("invalid radii r1 = {r1}, r2 = {r2}: require r1 > r2 > 0")]
    InvalidRadii { r1: f64, r2: f64 },

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("non-finite coordinate in input")]
    NonFinite,

    #[error("oracle input too large: {0} points (limit {1})")]
    OracleTooLarge(usize, usize),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
