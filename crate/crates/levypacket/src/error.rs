//! Crate-wide error type.
//!
//! Every fallible operation returns [`Error`]; the variants distinguish
//! mathematical preconditions (domain, poles, missing closed forms) from
//! numerical failures (aliasing, non-convergence) so callers can decide
//! whether a retry with different parameters makes sense.

use thiserror::Error;

/// Errors raised by the transform engine, law catalog and evaluators.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation requested exactly at a pole.
    #[error("pole: {0}")]
    Pole(String),

    /// Spectrum does not decay enough at the grid boundary, or a field
    /// wraps around under periodic convolution.
    #[error("aliasing: {0}")]
    Aliasing(String),

    /// A characteristic function failed the conjugate-symmetry check
    /// phi(-u) = conj(phi(u)) expected of real densities.
    #[error("non-symmetric spectrum: {0}")]
    NonSymmetric(String),

    /// An iterative or adaptive scheme did not reach the requested tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Input contains a non-integrable singularity or an atom where an
    /// absolutely continuous quantity is required.
    #[error("singular input: {0}")]
    Singularity(String),

    /// Parameters do not define an infinitely divisible law.
    #[error("not infinitely divisible: {0}")]
    NotInfinitelyDivisible(String),

    /// The Levy measure of the requested family is not part of the catalog.
    #[error("unknown Levy measure: {0}")]
    UnknownLevyMeasure(String),

    /// No closed form is available for the requested parameter values.
    #[error("unsupported closed form: {0}")]
    UnsupportedClosedForm(String),

    /// Operation requires two laws on the same scale.
    #[error("scale mismatch: {0}")]
    ScaleMismatch(String),

    /// The law has no density (degenerate or atomic part dominates).
    #[error("not absolutely continuous: {0}")]
    NotAbsolutelyContinuous(String),

    /// Malformed configuration or law expression.
    #[error("config error: {0}")]
    Config(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
