use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid modulus {0}: must be at least 2")]
    InvalidModulus(u64),

    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid witness family: p={p}, s={s} for n={n}")]
    InvalidFamily { n: u64, p: u64, s: u32 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("lemma violation: {0}")]
    LemmaViolation(String),

    #[error("hypotheses not met: {0}")]
    HypothesesNotMet(String),

    #[error("certificate failed validation: {0}")]
    CertificateValidation(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}
