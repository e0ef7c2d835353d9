use thiserror::Error;

/// Errors produced anywhere in the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("model schema violation: {0}")]
    Schema(String),

    #[error("eta not symmetric: eta[{row}][{col}] != eta[{col}][{row}]")]
    EtaNotSymmetric { row: usize, col: usize },

    #[error("eta is singular")]
    EtaSingular,

    #[error("eta_inv does not invert eta (deviation {0:e})")]
    EtaInverseMismatch(f64),

    #[error("grading pairing b_α+b_β=1 violated for (α, β) = ({alpha}, {beta})")]
    GradingPairing { alpha: usize, beta: usize },

    #[error("identity axiom fails: third derivative along (1, {alpha}, {beta}) is not eta[{alpha}][{beta}]")]
    IdentityAxiom { alpha: usize, beta: usize },

    #[error("potential term {term} violates the unit-direction structure: {reason}")]
    UnitDirection { term: usize, reason: String },

    #[error("unknown catalog model '{0}'")]
    UnknownModel(String),

    #[error("truncation must be at least 1, got {0}")]
    BadTruncation(usize),

    #[error("point has dimension {got}, model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value while evaluating {0}")]
    Overflow(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("correlator needs at least {min} insertions, got {got}")]
    TooFewInsertions { min: usize, got: usize },

    #[error("tensor order {0} outside the supported range 2..=6")]
    TensorOrder(usize),

    #[error("point is not semisimple: min |u_i - u_j| = {gap:e} <= {tol:e}")]
    NonSemisimple { gap: f64, tol: f64 },

    #[error("idempotent {0} has vanishing norm")]
    ZeroNorm(usize),

    #[error("eigenvalue computation failed: {0}")]
    Eigen(String),

    #[error("frame matching is ambiguous: {0}")]
    AmbiguousMatch(String),

    #[error("cross-check '{what}' disagrees by {residual:e} (tolerance {tol:e})")]
    CrossCheck { what: String, residual: f64, tol: f64 },

    #[error("irreducible correlator: {0}")]
    Irreducible(String),

    #[error("expression needs a canonical frame but none was supplied")]
    MissingFrame,

    #[error("unknown identity '{0}'")]
    UnknownIdentity(String),

    #[error("unknown suite '{0}'")]
    UnknownSuite(String),

    #[error("unknown report format '{0}'")]
    UnknownFormat(String),

    #[error("invalid complex literal '{0}'")]
    ComplexLiteral(String),
}

pub type Result<T> = std::result::Result<T, Error>;
