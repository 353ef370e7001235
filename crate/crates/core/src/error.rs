use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by a zero quaternion")]
    ZeroDivisor,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero vector has no projective class")]
    ZeroVector,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate line: the spanning points coincide")]
    DegenerateLine,

    #[error("ill-conditioned Gram system (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("point is on the boundary; distance is infinite")]
    InfiniteDistance,

    #[error("singular input: point on or outside the unit sphere")]
    SingularInput,

    #[error(
        "calibration error: Gram signature ({positive} positive, {negative} negative, {zero} zero) \
         is not that of a hyperbolic configuration of dimension {dim}"
    )]
    Calibration {
        positive: usize,
        negative: usize,
        zero: usize,
        dim: usize,
    },

    #[error("quadrature did not converge in {cells} cells (value {value:.12e}, error estimate {err_est:.3e})")]
    QuadratureFailure {
        value: f64,
        err_est: f64,
        cells: usize,
    },

    #[error("ideal extrapolation unstable: {0}")]
    ExtrapolationUnstable(String),

    #[error("internal error: {0}")]
    Internal(String),
}
