//! Crate-wide error type.

use crate::dist::DistributionFamily;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Scalar input outside its mathematical domain (non-positive RCS,
    /// non-positive Hankel argument, ...).
    #[error("domain error in {context}: {message}")]
    Domain {
        context: &'static str,
        message: String,
    },

    /// Structural mismatch between two inputs that must agree
    /// (axis lengths, frequency grids, class sets).
    #[error("mismatched inputs in {context}: {message}")]
    Mismatch {
        context: &'static str,
        message: String,
    },

    /// A constructor invariant was violated.
    #[error("invalid {what}: {message}")]
    Invalid { what: &'static str, message: String },

    /// An operation selected or produced an empty sample set.
    #[error("empty {what}")]
    Empty { what: &'static str },

    /// Time gate rejected everything; there is no target return to process.
    #[error("empty target zone: gated trace carries no energy")]
    EmptyTargetZone,

    /// Mie series would overflow the recurrence.
    #[error(
        "size parameter ka = {ka:.3e} exceeds 1e4; use sphere_rcs_approx in the optical region"
    )]
    MieOverflow { ka: f64 },

    /// A sample lies outside the support of the family being fitted.
    #[error("{family} does not support sample value {value}")]
    SupportViolation {
        family: DistributionFamily,
        value: f64,
    },

    /// Too few samples to fit.
    #[error("need at least {needed} samples to fit, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    /// Degenerate data (e.g. all samples equal) where spread is required.
    #[error("degenerate samples in {context}: {message}")]
    Degenerate {
        context: &'static str,
        message: String,
    },

    /// The optimizer exhausted its budget without a usable optimum.
    #[error("fit of {family} did not converge within the iteration budget")]
    FitNonConvergence { family: DistributionFamily },

    /// File parse failure with position diagnostics.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(context: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            context,
            message: message.into(),
        }
    }

    pub fn mismatch(context: &'static str, message: impl Into<String>) -> Self {
        Error::Mismatch {
            context,
            message: message.into(),
        }
    }

    pub fn invalid(what: &'static str, message: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            message: message.into(),
        }
    }
}
