use thiserror::Error;

/// Errors raised by the analysis engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("duplicate letter `{0}` in alphabet")]
    DuplicateLetter(String),
    #[error("letter index {index} outside alphabet of size {size}")]
    LetterOutOfRange { index: usize, size: usize },
    #[error("image of letter `{0}` is empty (morphisms must be nonerasing)")]
    EmptyImage(String),
    #[error("expected {expected} images, got {actual}")]
    ImageCount { expected: usize, actual: usize },
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("substitution is not primitive")]
    NotPrimitive,
    #[error("substitution is not left-proper")]
    NotLeftProper,
    #[error("every image has length 1: the generated system is finite")]
    FiniteSystem,
    #[error("no fixed-point seed: {0}")]
    SeedUnavailable(String),
    #[error("zero vector has no eigenvalue")]
    ZeroVector,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("orbit exceeded the cap of {cap} states")]
    OrbitCapExceeded { cap: usize },
    #[error("segment `{0}` is not a known return word")]
    UnknownReturnWord(String),
    #[error("word does not start with the seed letter")]
    NotStartingWithSeed,
    #[error("length vector is not an eigenvector with integer eigenvalue k >= 2: {0}")]
    EigenPrecondition(String),
    #[error("k must be at least 2, got {0}")]
    InvalidRoot(u64),
    #[error("internal contract violation: {0}")]
    ContractViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
