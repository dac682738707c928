use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field length {found} does not match grid node count {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at node {index}")]
    NonFiniteField { index: usize },

    #[error("diffusion tensor at ({x}, {y}) violates ellipticity bound {bound}: eigenvalues ({min_eig}, {max_eig})")]
    NotElliptic {
        x: f64,
        y: f64,
        bound: f64,
        min_eig: f64,
        max_eig: f64,
    },

    #[error("point ({x}, {y}) is at distance {distance} <= 1 from the Carleman center")]
    WeightDomain { x: f64, y: f64, distance: f64 },

    #[error("invalid Carleman parameters: {0}")]
    InvalidCarleman(String),

    #[error("cutoff bound must be positive, got {0}")]
    InvalidCutoff(f64),

    #[error("nonlinearity returned a non-finite value at ({x}, {y})")]
    NonFiniteNonlinearity { x: f64, y: f64 },

    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("Cholesky factorization failed at pivot {pivot} (value {value:e})")]
    Factorization { pivot: usize, value: f64 },

    #[error("conjugate gradient did not converge in {iterations} iterations (relative residual {residual:e})")]
    CgNotConverged { iterations: usize, residual: f64 },

    #[error("unknown test problem {0:?}")]
    UnknownProblem(String),

    #[error("problem {0} has no exact solution")]
    MissingExactSolution(String),

    #[error("trace has {found} iterations, at least {required} are needed")]
    TraceTooShort { required: usize, found: usize },

    #[error("fixed-point iteration aborted after {} iterations: {source}", trace.len())]
    Aborted {
        #[source]
        source: Box<Error>,
        trace: crate::driver::IterationTrace,
    },
}
