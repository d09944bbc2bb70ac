use thiserror::Error;

pub type Result<T> = std::result::Result<T, QcorrError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QcorrError {
    #[error("invalid dimension {0}: local dimensions must lie in 2..=16")]
    InvalidDimension(usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace:.12}, expected 1")]
    TraceViolation { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid subsystem index {index} for a {parties}-partite state")]
    InvalidSubsystem { index: usize, parties: usize },

    #[error("invalid bipartition cut {cut} for a {parties}-partite state")]
    InvalidCut { cut: usize, parties: usize },

    #[error("invalid subsystem selection: {0}")]
    InvalidSelection(String),

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("{parties} subsystems exceed the permutation limit of {limit}")]
    PermutationLimit { parties: usize, limit: usize },

    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("corollary violated: second step {second:.3e} exceeds tolerance")]
    CorollaryViolated { second: f64 },

    #[error("chain parameters invalid: {0}")]
    InvalidChain(String),

    #[error("grid too coarse: {points} points, at least {min} required")]
    GridTooCoarse { points: usize, min: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("derivative vanishes everywhere, no peak")]
    NoPeak,

    #[error("parse error: {0}")]
    Parse(String),
}
