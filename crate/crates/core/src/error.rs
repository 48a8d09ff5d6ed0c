//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the exact symbolic operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Operands live on tori of different dimensions, or have incompatible kinds.
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    /// A divisor could not be certified nowhere-vanishing.
    #[error("division by a function that could not be certified nowhere-vanishing: {0}")]
    DivisionUncertified(String),
    /// A zero-mode projection was requested over coordinates the denominator depends on.
    #[error("zero-mode projection unavailable: denominator depends on coordinate {0}")]
    ProjectionUnavailable(usize),
    /// An argument had the wrong exterior degree.
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    /// A bivector is not tangent to the leaves (not of pure leaf bigrade).
    #[error("bivector is not leafwise with respect to the splitting")]
    NotLeafwise,
    /// The leaf block of the Poisson tensor could not be certified invertible.
    #[error("leaf block determinant could not be certified nowhere-vanishing")]
    SingularLeafBlock,
    /// A bivector fails to satisfy the Jacobi identity.
    #[error("bivector is not Poisson: [Pi, Pi] = {0}")]
    NotPoisson(String),
    /// The splitting data is inconsistent.
    #[error("invalid splitting: {0}")]
    InvalidSplitting(String),
    /// An infinitesimal deformation was expected but l1(Z) is nonzero.
    #[error("argument is not a cocycle: l1(Z) = {0}")]
    NotACocycle(String),
    /// An exactness question was asked about a non-closed element.
    #[error("argument is not closed")]
    NotClosed,
    /// The gauge transform is not defined because id + gamma Z is not certified invertible.
    #[error("outside the gauge domain: determinant {0} could not be certified nowhere-vanishing")]
    OutsideGaugeDomain(String),
    /// A multivector with more than one transverse slot was passed where a good one is required.
    #[error("multivector is not good with respect to the splitting")]
    NotGood,
    /// A deformation path does not start at the given Poisson structure.
    #[error("path does not start at the Poisson structure")]
    PathBase,
    /// A skew-symmetric matrix was expected.
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    /// Parse failure with 1-based position.
    #[error("syntax error at line {line}, column {column}: {message}")]
    SyntaxError { line: usize, column: usize, message: String },
    /// A coordinate or frame index outside `1..=dim`.
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    /// The parsed expression has the wrong kind (e.g. a form where a multivector was expected).
    #[error("kind error: {0}")]
    KindError(String),
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
