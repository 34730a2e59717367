use thiserror::Error;

/// Errors surfaced by the library. Verification failures that the theory
/// rules out are reported through [`Error::VerificationFailed`] or
/// [`Error::Invariant`] rather than panics, so callers can attach context.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("point is not on the curve")]
    NotOnCurve,

    #[error("unsupported case at p = {p}: {reason}")]
    Unsupported { p: u64, reason: String },

    #[error("model is not minimal at p = {p} (v(disc) = {v_disc}, v(c4) = {v_c4}); supply a minimal model")]
    NonMinimal { p: u64, v_disc: i64, v_c4: i64 },

    #[error("point reduces to the singular point at p = {p}; local height needs residual accounting")]
    ResidualRequired { p: u64 },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("no admissible prime found below {ceiling}")]
    SearchExhausted { ceiling: u64 },

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
