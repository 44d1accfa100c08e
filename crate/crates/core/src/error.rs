use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A^H| = {residual:.3e})")]
    NonHermitianInput { residual: f64 },
    #[error("matrix is not unitary (max |U^H U - I| = {residual:.3e})")]
    NonUnitaryInput { residual: f64 },
    #[error("eigenvalue {value:.3e} outside the domain of the requested function")]
    DomainError { value: f64 },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid Hamiltonian: {0}")]
    InvalidHamiltonian(String),
    #[error("temperature must be positive and finite, got {0}")]
    NonpositiveTemperature(f64),
    #[error("alpha must lie in [0, 1], got {0}")]
    AlphaOutOfRange(f64),
    #[error("operation requires dimension {expected}, got {found}")]
    DimensionError { expected: usize, found: usize },
    #[error("nonthermality is infinite: the decohered population vanishes")]
    InfiniteNonthermality,
    #[error("Bloch vector norm {0:.12} exceeds 1")]
    BlochNormExceeded(f64),
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("mixing parameter must lie in [0, 1], got {0}")]
    MixingOutOfRange(f64),
    #[error("interpolation parameter must lie in [0, 1], got {0}")]
    ThetaOutOfRange(f64),
    #[error("trajectory record has zero forward probability")]
    ZeroProbabilityRecord,
    #[error("state is rank deficient (smallest eigenvalue {0:.3e})")]
    RankDeficientState(f64),
    #[error("terminal Hamiltonian is infeasible: {0}")]
    InfeasibleTerminal(String),
    #[error("spectra of the initial and rotated states differ by {0:.3e}")]
    SpectrumMismatch(f64),
    #[error("ensemble would contain {0} records, above the cap of {1}")]
    EnsembleTooLarge(u128, u128),
    #[error("brute-force oracle supports d <= 5, got {0}")]
    DimensionTooLarge(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
