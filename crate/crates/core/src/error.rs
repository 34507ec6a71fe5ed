use alloc::vec::Vec;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid Fock space: dim = {dim}, guard = {guard} (need dim >= 2 and guard < dim)")]
    InvalidSpace { dim: usize, guard: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{what} is not Hermitian (defect {defect:.3e})")]
    NotHermitian { what: &'static str, defect: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("photon number k = {k} must satisfy 1 <= k < dim = {dim}")]
    PhotonNumberOutOfRange { k: usize, dim: usize },
    #[error("{0} vector is zero")]
    ZeroVector(&'static str),
    #[error("seed lies entirely in the opposite parity sector")]
    EmptyParitySector,
    #[error("seed has amplitude {amplitude:.3e} at level {level}, inside the guard band")]
    GuardBandSupport { level: usize, amplitude: f64 },
    #[error("branch selection failed: top-block condition number {condition:.3e}; weights {weights:?}")]
    BranchSelection { condition: f64, weights: Vec<f64> },
    #[error("Riccati residual {residual:.3e} exceeds {tolerance:.1e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },
    #[error("{what} is ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { what: &'static str, condition: f64 },
    #[error("alpha = {0} lies outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("matrix contains non-finite entries")]
    NonFinite,
}

impl Error {
    /// True for failures caused by conditioning or branch selection rather
    /// than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BranchSelection { .. }
                | Error::ResidualTooLarge { .. }
                | Error::IllConditioned { .. }
                | Error::NonFinite
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
