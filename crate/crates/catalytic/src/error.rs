use thiserror::Error;

/// Errors shared across state construction, majorization and the catalyst builders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("probability vector not normalized: sum = {0}")]
    NotNormalized(f64),

    #[error("negative probability entry {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix is not Hermitian (max |M - M^dag| = {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("dimension {requested} exceeds cap {cap}{context}")]
    DimensionCapExceeded {
        requested: usize,
        cap: usize,
        context: String,
    },

    #[error("unknown subsystem label '{0}'")]
    UnknownLabel(String),

    #[error("layout dimensions {layout_dim} inconsistent with state dimension {state_dim}")]
    InconsistentLayout { layout_dim: usize, state_dim: usize },

    #[error("partition does not cover all subsystem factors")]
    InvalidPartition,

    #[error("basis is not orthonormal (max residual {0:.3e})")]
    NonOrthonormalBasis(f64),

    #[error("matrix is not unitary (max |U^dag U - I| = {0:.3e})")]
    NotUnitary(f64),

    #[error("channel is not mixed-unitary")]
    NotMixedUnitary,

    #[error("eigendecomposition failed: {0}")]
    EigenFailure(String),

    #[error("majorization precondition violated: {0}")]
    Majorization(String),

    #[error("entropy gap violated: H(target) = {target} must exceed H(input) = {input}")]
    EntropyGap { input: f64, target: f64 },

    #[error("typical truncation is degenerate: all mass atypical at n = {n}, delta = {delta}")]
    DegenerateTruncation { n: usize, delta: f64 },

    #[error("no admissible copy count reaches epsilon = {requested}; smallest achievable certified bound is {achievable} at n = {at_n}")]
    EpsilonUnreachable {
        requested: f64,
        achievable: f64,
        at_n: usize,
    },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("target entropy {target} exceeds maximum ln(d) = {max} for dimension {dim}")]
    EntropyAboveMax { target: f64, max: f64, dim: usize },

    #[error("inverse-temperature solve failed: {0}")]
    BetaSolve(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
