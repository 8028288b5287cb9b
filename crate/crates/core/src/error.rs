use thiserror::Error;

use crate::construct::VerificationReport;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Zero was passed where a nonzero scalar is required.
    #[error("zero is not a valid {0}")]
    ZeroValue(&'static str),

    /// A prime was required but the given number is not one.
    #[error("{0} is not prime")]
    NotPrime(u64),

    /// The Legendre symbol is only defined at odd primes.
    #[error("{0} is not an odd prime")]
    OddPrimeRequired(u64),

    /// Trial division gave up before fully factoring the input.
    #[error("cannot factor {value} completely by trial division up to {bound}")]
    IncompleteFactorization { value: String, bound: u64 },

    /// Operands live over different tower fields.
    #[error("tower mismatch: {left} vs {right}")]
    TowerMismatch { left: String, right: String },

    /// A base-field decider was applied to a form over a proper tower.
    #[error("operation requires a form over Q, got tower level {level}")]
    LevelZeroRequired { level: usize },

    /// Variable index outside the tower.
    #[error("variable index {index} out of range for tower level {level}")]
    IndexOutOfRange { index: usize, level: usize },

    /// The pure subform of the 0-fold Pfister form is empty and must be
    /// special-cased by the caller.
    #[error("0-fold Pfister form has no pure subform")]
    ZeroFoldPfister,

    /// Text input could not be parsed; `pos` is a byte offset into the input.
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// A certificate is structurally inconsistent (mixed towers, empty term
    /// list, bad fold level).
    #[error("malformed certificate: {0}")]
    Certificate(String),

    /// A fresh Laurent variable collides with one already in the tower.
    #[error("variable {0:?} already bound in the tower")]
    VariableCollision(String),

    /// construct_step needs exactly one fresh variable per certificate term.
    #[error("certificate has {terms} terms but {vars} fresh variables were supplied")]
    TermCountMismatch { terms: usize, vars: usize },

    /// A documented precondition was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A pipeline step failed verification. The recursion theorem guarantees
    /// every step verifies, so this indicates a bug, not bad input.
    #[error("pipeline verification failed at fold level {level}")]
    PipelineVerification {
        level: usize,
        report: Box<VerificationReport>,
    },

    #[error("certificate serialization: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
