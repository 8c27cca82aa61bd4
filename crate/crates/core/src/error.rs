use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Hilbert space dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("matrix is not square or has inconsistent shape ({rows}x{cols})")]
    BadShape { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("operator is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("unphysical Bloch vector: minimum eigenvalue {min_eigenvalue:e} of the reconstructed state")]
    UnphysicalBlochVector { min_eigenvalue: f64 },

    #[error("Bloch vector norm squared {norm_sq} exceeds sphere radius squared {bound}")]
    OutsideBlochSphere { norm_sq: f64, bound: f64 },

    #[error("generator has imaginary residue {residue:e} above tolerance; Hamiltonian likely not Hermitian")]
    ComplexResidue { residue: f64 },

    #[error("non-unique steady state: generator has rank {rank} < {dim}")]
    NonUniqueSteadyState { rank: usize, dim: usize },

    #[error("eigensolver failed to converge")]
    EigenSolverFailed,

    #[error("matrix exponential overflow: entries beyond scaling capacity")]
    ExpOverflow,

    #[error("singular matrix in linear solve")]
    Singular,

    #[error("stationary point: gradient norm {norm:e} gives no first-order improvement")]
    StationaryPoint { norm: f64 },

    #[error("phase coherence undefined: state at a pole (denominator {denominator:e})")]
    CoherenceUndefined { denominator: f64 },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
