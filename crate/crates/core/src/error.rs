use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// Constructors validate their invariants eagerly, so a value of any public
/// type is a certificate that its defining laws hold. Everything that can be
/// rejected is rejected here, with enough context to name the violated law.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not a chain complex: {0}")]
    NotAComplex(String),

    #[error("not a chain map: {0}")]
    NotAChainMap(String),

    #[error("not a group: {0}")]
    NotAGroup(String),

    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(String),

    #[error("not a category: {0}")]
    NotACategory(String),

    #[error("not a profunctor: {0}")]
    NotAProfunctor(String),

    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("no solution: {0}")]
    NoSolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
