//! Error type shared by every layer of the engine.

/// All failure modes surfaced by the library.
///
/// Checks that *fail mathematically* (an identity that does not hold) are not
/// errors; they are reported through [`crate::report::CheckReport`].  Errors
/// are reserved for ill-posed requests: malformed data, indices outside the
/// allowed coset, windows too small to certify anything, and so on.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("series product is not summable: {0}")]
    NonSummable(String),

    #[error("state is not homogeneous: charges {0}")]
    NotHomogeneous(String),

    #[error("operand is the zero state: {0}")]
    ZeroState(String),

    #[error("index lies outside the allowed coset: {0}")]
    CosetMismatch(String),

    #[error("bilinear form is degenerate on the subgroup")]
    DegenerateForm,

    #[error("subgroup is not integral for the given form")]
    NotIntegral,

    #[error("invalid invariant: {0}")]
    InvalidInvariant(String),

    #[error("incompatible lattices: {0}")]
    IncompatibleLattices(String),

    #[error("charge outside the module coset: {0}")]
    ChargeOutsideCoset(String),

    #[error("twisted-module dictionary violated: {0}")]
    DictionaryMismatch(String),

    #[error("window too small to certify a single coefficient: {0}")]
    PrecisionTooSmall(String),

    #[error("invalid algebra description: {0}")]
    InvalidSpec(String),

    #[error("syntax error at byte {position}: {message}")]
    SyntaxError { position: usize, message: String },

    #[error("unknown basis name `{0}`")]
    UnknownBasisName(String),
}

pub type Result<T> = std::result::Result<T, Error>;
