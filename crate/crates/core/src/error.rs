use thiserror::Error;

/// Errors raised by the geometric routines.
///
/// Points are carried as `f64` vectors so that the error type does not depend
/// on the scalar type of the computation that produced it.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GkError {
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),

    #[error("point {point:?} is not strictly inside the polytope (facet {facet} has value {value:e})")]
    OutsideInterior { point: Vec<f64>, facet: usize, value: f64 },

    #[error("hessian of the symplectic potential is not positive-definite at {point:?}")]
    ConvexityViolation { point: Vec<f64> },

    #[error(
        "parameters are inadmissible at {point:?}: minimum eigenvalue {eigenvalue:e} of I + (S^-1/2 F S^-1/2)^2/4"
    )]
    InadmissibleParams { point: Vec<f64>, eigenvalue: f64 },

    #[error("matrix `{what}` is ill-conditioned (condition number {condition:e})")]
    IllConditioned { what: &'static str, condition: f64 },

    #[error("matrix `{0}` is not antisymmetric")]
    NotAntisymmetric(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("interior grid is empty after applying the margin; refine the resolution or lower the margin")]
    GridTooCoarse,

    #[error("invalid grid specification: {0}")]
    InvalidGrid(String),

    #[error("derivative order {0} is not supported (0..=4)")]
    UnsupportedOrder(usize),

    #[error("clifford elements live in different ambient spaces")]
    AmbientMismatch,

    #[error("spinors were built from different complex structures")]
    FrameMismatch,

    #[error("complex structure is not compatible with the metric: {0}")]
    IncompatibleStructure(String),

    #[error("no equivariant intertwiner exists (smallest singular value {0:e})")]
    Equivariance(f64),

    #[error("spinor representation is singular")]
    SingularRepresentation,

    #[error("invalid optimizer input: {0}")]
    InvalidOptimizer(String),
}

pub type Result<T> = std::result::Result<T, GkError>;
