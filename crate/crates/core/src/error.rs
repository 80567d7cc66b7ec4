use thiserror::Error;

/// Errors surfaced by the exact-computation kernel and the geometric layers.
///
/// Every payload is a plain string so the enum stays `Eq`/`Clone` and can be
/// asserted on directly in tests.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A connection matrix entry has a pole at the requested expansion basepoint.
    #[error("connection has a pole at the expansion basepoint {0}")]
    PoleAtBasepoint(String),

    /// The characteristic polynomial of a residue matrix has a root outside ℤ.
    #[error("characteristic polynomial has a non-integer root ({0})")]
    NonIntegerEigenvalue(String),

    /// A 2×2 matrix expected to lie in the trace-free Lie algebra has nonzero trace.
    #[error("matrix is not traceless (trace = {0})")]
    NonTraceless(String),

    /// A function was evaluated (or jet-extracted) at one of its poles.
    #[error("function has a pole at {0}")]
    PoleAtPoint(String),

    /// A chart map is not invertible at its center (vanishing first derivative),
    /// or an O(S)-twisted transition does not fix the marked point.
    #[error("chart map is not invertible at its center ({0})")]
    NonInvertibleChart(String),

    /// The level-2 second fundamental form is undefined because the connection
    /// does not map the line F1 into F2 ⊗ K.
    #[error("second fundamental form undefined: F1 is not mapped into F2 ⊗ K")]
    NotNested,

    /// The residue endomorphism does not preserve the subspace chosen for an
    /// elementary modification.
    #[error("residue does not preserve the chosen subspace")]
    ResidueDoesNotPreserve,

    /// The subspace handed to an elementary modification is not spanned by
    /// residue eigenvectors (geometric/algebraic multiplicity mismatch).
    #[error("subspace is not spanned by residue eigenvectors")]
    EigenspaceDimensionMismatch,

    /// A divisor that must be reduced (all multiplicities one) is not.
    #[error("divisor is not reduced: {0}")]
    NonReducedDivisor(String),

    /// A computation that requires the five pair conditions was invoked on a
    /// pair violating them.
    #[error("pair conditions violated: {0}")]
    ConditionViolation(String),

    /// Reconstruction was requested for a pair that fails the oper criterion.
    #[error("pair does not satisfy the oper criterion: {0}")]
    NotAnOper(String),

    /// A branch point (root of the derivative of the developing map) does not
    /// lie in the Gaussian rationals, so it cannot be represented exactly.
    #[error("branch point is not a Gaussian rational (unsplit factor: {0})")]
    NonRationalBranchPoint(String),

    /// Exact division by zero (scalar, rational function, or singular matrix).
    #[error("division by zero ({0})")]
    DivisionByZero(String),

    /// Text-format parse failure with 1-based line and column.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, col, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
