use crate::interval::CertInterval;

/// Errors shared across the crate.
///
/// `Domain` means the inputs are outside an operation's contract, `Resource`
/// means an internal step/precision/digit budget ran out, and `Inconclusive`
/// means the requested decision cannot be made at the requested precision
/// (retry with smaller epsilon). These map onto the CLI exit codes 2 and 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    /// Like `Resource`, but a certified partial result was obtained before
    /// the budget ran out and is worth surfacing.
    #[error("resource budget exceeded: {msg}; best enclosure so far [{}, {}]", best.lo_f64(), best.hi_f64())]
    ResourceWithEnclosure { msg: String, best: CertInterval },

    /// Factorization gave up on a composite cofactor (beyond the 96-bit
    /// budget, or rho failed to split it within its iteration cap).
    #[error("unfactored cofactor of {bits} bits; bad-prime set cannot be certified")]
    UnfactoredCofactor { bits: u64 },

    #[error("inconclusive at requested precision: {0}")]
    Inconclusive(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub fn inconclusive(msg: impl Into<String>) -> Self {
        Error::Inconclusive(msg.into())
    }

    /// CLI exit code for this error: 2 for domain errors, 3 for
    /// resource/inconclusive ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
