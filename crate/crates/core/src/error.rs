use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("momentum has dimension {got}, model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The coupling violates `|U| < 2 e_min / b`.
    #[error("coupling U = {coupling} is not admissible: need |U| < {limit}")]
    Inadmissible { coupling: f64, limit: f64 },

    #[error(
        "quadrature did not converge after {points} points per dimension \
         (last estimates {previous} and {last})"
    )]
    QuadratureNonConvergence {
        previous: f64,
        last: f64,
        points: usize,
    },

    #[error("root is not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    BracketFailure {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("root finder exceeded {0} iterations")]
    MaxIterations(usize),

    #[error("{what} = {value} lies outside ({lo}, {hi})")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("argument outside the domain of {0}")]
    Domain(&'static str),

    #[error("logarithm argument {0} is not positive")]
    LogArgument(f64),

    #[error("operation not supported for dispersion kind {0}")]
    UnsupportedKind(&'static str),

    #[error("point lies on the phase boundary (g = {0}); the limit statement differs there")]
    BoundaryPoint(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
