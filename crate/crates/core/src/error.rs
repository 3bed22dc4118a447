use alloc::vec::Vec;

/// Errors raised by the geometry, solver and construction routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid curve: radius {radius} at theta = {theta}")]
    InvalidCurve { theta: f64, radius: f64 },

    #[error("invalid perturbation: 1 + xi = {value} at theta = {theta}")]
    InvalidPerturbation { theta: f64, value: f64 },

    #[error("configuration error: {0}")]
    Config(&'static str),

    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("curves {inner} and {outer} are not nested")]
    NotNested { inner: usize, outer: usize },

    #[error("collocation residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotConverged { residual: f64, tolerance: f64 },

    #[error("ill-conditioned collocation system: numerical rank {rank} of {columns}")]
    IllConditioned { rank: usize, columns: usize },

    #[error("truncation mismatch: field has {field} modes, spectrum has {spectrum}")]
    TruncationMismatch { field: usize, spectrum: usize },

    #[error("the Dirichlet-to-Neumann map is not invertible on constants (mean = {mean:e})")]
    KernelObstruction { mean: f64 },

    #[error("flux mean {raw_mean:e} exceeds tolerance {tolerance:e}")]
    MeanDefect { raw_mean: f64, tolerance: f64 },

    #[error("degenerate linearization: boundary coefficient vanishes for sigma3 = {sigma3}")]
    DegenerateLinearization { sigma3: f64 },

    #[error("perturbation amplitude {amplitude:e} exceeds cap {cap:e}")]
    AmplitudeTooLarge { amplitude: f64, cap: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged {
        iterations: usize,
        residual: f64,
        trace: Vec<f64>,
    },

    #[error("gluing requires a converged residual: {residual:e} > {tolerance:e}")]
    ContractViolation { residual: f64, tolerance: f64 },
}

impl Error {
    /// True for failures of an iterative or least-squares process, as
    /// opposed to rejected inputs.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. } | Error::IllConditioned { .. } | Error::NewtonDiverged { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
