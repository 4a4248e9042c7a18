//! Error type shared by every module in the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is outside the domain of the function
    /// (negative angular momentum, zero hyperfine constant, empty grid, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The combination of quantum numbers is valid but not handled by this
    /// crate (for example a solver asked for a line other than J -> J+1).
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    /// A lookup by species name or manifold failed.
    #[error("not found: {0}")]
    NotFound(String),

    /// An evaluation was requested closer to a scattering resonance than the
    /// configured exclusion radius.
    #[error("detuning within exclusion radius of resonance at {resonance} (2*pi MHz)")]
    PoleProximity {
        /// Location of the offending resonance, in 2π·MHz.
        resonance: f64,
    },

    /// A residual or spread was requested at a point where the normalizing
    /// denominator vanishes, so no scale-free value exists.
    #[error("normalizer vanishes: {0}")]
    VanishingNormalizer(String),

    /// A text table could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse {
        /// 1-based line number in the input.
        line: usize,
        /// Description of the problem.
        message: String,
    },

    /// A record violates a physical invariant (triangle rule, sign
    /// constraint on the splittings, ...).
    #[error("invariant violation in field `{field}`: {message}")]
    InvariantViolation {
        /// Name of the offending field.
        field: String,
        /// Description of the violated constraint.
        message: String,
    },

    /// Two records in one table share the (species, F) key.
    #[error("duplicate record for {0}")]
    DuplicateKey(String),

    /// Two routes that must agree produced different answers. This always
    /// indicates a bug, never bad input.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    /// An underlying I/O operation failed.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
