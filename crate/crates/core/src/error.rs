use num_complex::Complex64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: expected {expected}, got {actual} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("{energy} is not an eigenvalue of the matrix (residual {residual:e})")]
    NotAnEigenvalue { energy: Complex64, residual: f64 },
    #[error("EP3 refinement drifted {drift:e} away from the analytic seed")]
    RefinementDiverged { drift: f64 },
    #[error("resultant vector is not real (relative imaginary part {relative:e})")]
    RealnessViolation { relative: f64 },
    #[error("resultant zero on loop near ({lambda1}, {lambda2})")]
    ResultantZeroOnLoop { lambda1: f64, lambda2: f64 },
    #[error("adaptive loop refinement exceeded {cap} samples")]
    SampleCapExceeded { cap: usize },
    #[error("winding number not quantized: raw value {raw}")]
    NotQuantized { raw: f64 },
    #[error("integration unstable at t = {time}: norm grew to {norm}")]
    Unstable { time: f64, norm: f64 },
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("exponent aliasing: |E|·dt = {product} >= pi")]
    Aliasing { product: f64 },
    #[error("signal rank {rank} is below the requested model order {order}")]
    RankDeficient { rank: usize, order: usize },
    #[error("spectrum is not of the symmetric form: {0}")]
    NotSymmetric(String),
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
}
