use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("wave vector must be nonzero")]
    ZeroWaveVector,
    #[error("mode {0:?} (or its negation) appears more than once")]
    DuplicateMode([f64; 3]),
    #[error("l_max must be non-negative, got {0}")]
    NegativeLmax(i64),
    #[error("Fock dimension {dim} exceeds cap {cap}")]
    DimensionCapExceeded { dim: u128, cap: usize },
    #[error("channel {0} is not part of this space")]
    UnknownChannel(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state has vanishing indefinite norm")]
    ZeroNormState,
    #[error("channel mismatch: {0}")]
    ChannelMismatch(String),
    #[error("mode set is not closed under k -> -k")]
    AsymmetricGrid,
    #[error("unknown decomposition '{0}'")]
    UnknownDecomposition(String),
    #[error("mode {0:?} is not on the reciprocal lattice of the charge box")]
    IncommensurateGrid([f64; 3]),
    #[error("constraint kernel is empty at tolerance {0:e}")]
    NoKernel(f64),
    #[error("no singular-value gap around tolerance {tol:e}: included {below:e}, excluded {above:e}")]
    ToleranceAmbiguous { tol: f64, below: f64, above: f64 },
    #[error("physical subspace is empty")]
    EmptySubspace,
    #[error("grid resolution {n} too coarse for lattice index {max_index} (need n >= {needed})")]
    BandLimitViolation { n: usize, max_index: i64, needed: i64 },
    #[error("wave vector {0:?} is not on the box reciprocal lattice")]
    OffLatticeMode([f64; 3]),
    #[error("orbital integrand is not box-periodic for this state (modes must be collinear)")]
    OamNotPeriodic,
    #[error("unknown suite '{0}'")]
    UnknownSuite(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown output format '{0}'")]
    UnknownFormat(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
