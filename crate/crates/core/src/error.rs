use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Cartan matrix: {0}")]
    InvalidCartan(String),

    #[error("Cartan matrix is not symmetrizable")]
    NotSymmetrizable,

    #[error("node index {index} out of range for rank {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("elements belong to different Weyl groups")]
    GroupMismatch,

    #[error("{what} budget of {limit} exceeded")]
    BudgetExceeded { what: &'static str, limit: usize },

    #[error("element does not reduce to the identity; matrix is not a Weyl group element")]
    CorruptedElement,

    #[error("elements are not comparable in the twisted order")]
    NotComparable,

    #[error("witness set has no unique Bruhat-minimal element")]
    AmbiguousMinimum,

    #[error("neither s_i w <=^J w nor w <=^J s_i w holds")]
    IncomparablePair,

    #[error("element is not below the target in Bruhat order")]
    NotLeq,

    #[error("word {0:?} is not reduced")]
    NonReducedWord(Vec<usize>),

    #[error("reflection order does not contain a required reflection")]
    MissingReflection,

    #[error("poset is not pure")]
    NotPure,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("parameter {0} is not positive")]
    NonPositiveParameter(usize),

    #[error("parameter {0} is zero")]
    ZeroParameter(usize),

    #[error("LU/UL decomposition fails: {0}")]
    DecompositionFails(String),

    #[error("root-support pattern violated: {0}")]
    PatternViolation(String),

    #[error("triple is not a member of Q")]
    NotMember,

    #[error("the pair (e, e) has an empty link")]
    TrivialPair,

    #[error("postcondition failed: {0}")]
    Postcondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
