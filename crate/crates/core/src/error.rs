use thiserror::Error;

/// Errors surfaced by the numerical operations in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` must satisfy {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("spin count n must be in 1..={max}, got {n}")]
    SpinCountOutOfRange { n: u32, max: u32 },

    #[error("dense backend is capped at n <= {cap}, got n = {n}")]
    DenseCapExceeded { n: u32, cap: u32 },

    #[error("dimension mismatch: operator has n = {expected}, argument has n = {got}")]
    DimensionMismatch { expected: u32, got: u32 },

    #[error(
        "spectral parameter E = {e} is inside or too close to the spectrum \
         (measured top eigenvalue {top}, required margin {margin})"
    )]
    SpectrumProximity { e: f64, top: f64, margin: f64 },

    #[error("singular summand: E = {e} does not exceed the negative-part value {value} at configuration {sigma}")]
    SingularSummand { e: f64, value: f64, sigma: usize },

    #[error("operator kind not supported here: {0}")]
    WrongOperatorKind(&'static str),

    #[error("regime violation: {0}")]
    RegimeViolation(String),

    #[error(
        "matrix exponential did not reach tolerance {tol:e} \
         (krylov_dim {krylov_dim}, substeps {substeps}, best error estimate {estimate:e})"
    )]
    ExpmNoConvergence {
        tol: f64,
        krylov_dim: usize,
        substeps: u64,
        estimate: f64,
    },

    #[error("eigenvalue iteration did not converge after {iterations} iterations (best residual {residual:e})")]
    EigsNoConvergence { iterations: usize, residual: f64 },

    #[error("linear solve did not converge after {iterations} iterations (relative residual {residual:e})")]
    SolveNoConvergence { iterations: usize, residual: f64 },

    #[error("fatal numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
