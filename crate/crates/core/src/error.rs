use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |a_ij - conj(a_ji)| = {0:e})")]
    NotHermitian(f64),

    #[error("matrix has NaN or infinite entries")]
    NonFinite,

    #[error("matrix is empty")]
    Empty,

    #[error(
        "covariance is not positive definite: min eigenvalue {min_eigenvalue:e} <= {threshold:e}"
    )]
    NotPositiveDefinite { min_eigenvalue: f64, threshold: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("AN null space empty: N_t = {n_active} active antennas but rank(H T) = {rank}")]
    AnNullSpaceEmpty { n_active: usize, rank: usize },

    #[error("ZFC infeasible: F P_JM has rank {rank} >= N_b = {n_bob}")]
    ZfcInfeasible { rank: usize, n_bob: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("eigen-decomposition failed to converge")]
    NoConvergence,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
