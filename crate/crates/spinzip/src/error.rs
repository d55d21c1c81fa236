use thiserror::Error;

/// Errors produced by state constructors, Hamiltonian builders, and
/// integration runs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("spin index {index} out of range for a {n_spins}-spin register")]
    SpinIndexOutOfRange { index: usize, n_spins: usize },

    #[error("register size {n_spins} exceeds the supported maximum {max}")]
    RegisterTooLarge { n_spins: usize, max: usize },

    #[error("invalid spin triple ({0}, {1}, {2}): indices must be distinct and within the register")]
    InvalidTriple(usize, usize, usize),

    #[error("matrix is not Hermitian: max deviation {max_deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { max_deviation: f64, tolerance: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("photon cutoff saturated: top Fock level holds population {population:.3e} (limit {limit:.1e})")]
    CutoffSaturated { population: f64, limit: f64 },

    #[error("norm drifted by {drift:.3e} during integration (limit {limit:.1e})")]
    NormDrift { drift: f64, limit: f64 },

    #[error("branch amplitude too small for a phase check: |amplitude| = {magnitude:.3e} on the {branch} branch")]
    BranchAmplitudeTooSmall { branch: &'static str, magnitude: f64 },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
