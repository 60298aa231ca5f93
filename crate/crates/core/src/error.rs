use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not {0}")]
    InvalidMatrix(&'static str),

    #[error("eigenvalues of the real realization do not pair up (gap {gap:e})")]
    UnpairedSpectrum { gap: f64 },

    #[error("bodies {0} and {1} collide")]
    Collision(usize, usize),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid inertia spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid pairing: {0}")]
    InvalidPairing(String),

    #[error("invalid symmetry element: eta^p * det D'' must be +1")]
    InvalidGammaElement,

    #[error("not a signed permutation with determinant +1")]
    NotSignedPermutation,

    #[error("invalid splitting: {0}")]
    InvalidSplitting(String),

    #[error("p = {p} is not supported here (allowed: {allowed})")]
    UnsupportedDimension { p: usize, allowed: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
