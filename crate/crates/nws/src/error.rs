use thiserror::Error;

/// Unified error type for the library.
///
/// Exact-arithmetic operations fail only on structural mismatches (two
/// different field extensions, two different exponential rates); evaluation
/// can fail on range overflow; table construction can fail on a vanishing
/// reference value.
#[derive(Debug, Error)]
pub enum Error {
    /// Two scalars live in genuinely different quadratic extensions.
    #[error("incompatible extension: sqrt({0}) vs sqrt({1})")]
    IncompatibleExtension(String, String),

    /// Two expressions are built over different exponential rates kappa^2.
    #[error("mismatched r: {0} vs {1}")]
    MismatchedR(String, String),

    /// Integrating a series whose top coefficient is nonzero would silently
    /// drop a term.
    #[error("order overflow: nonzero coefficient at degree {0} cannot shift past the series order")]
    OrderOverflow(usize),

    /// Evaluation left the representable range (|kappa*x| > 700 or an
    /// exponential argument overflowed).
    #[error("evaluation range: {0}")]
    Range(String),

    /// Relative error against a zero reference value.
    #[error("undefined relative error: exact value is zero")]
    UndefinedRelativeError,

    /// Unsupported rendering format.
    #[error("unknown format: {0}")]
    UnknownFormat(String),

    /// Partial-sum index beyond the computed terms.
    #[error("index out of range: {0}")]
    IndexOutOfRange(usize),

    /// Invalid problem parameters or malformed input.
    #[error("validation: {0}")]
    Validation(String),

    /// Exact inverse of zero (zero-norm scalar).
    #[error("division by zero")]
    DivisionByZero,
}

pub type Result<T> = std::result::Result<T, Error>;
