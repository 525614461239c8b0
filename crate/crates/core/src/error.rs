use thiserror::Error;

/// Errors raised by the symbolic kernel and the numeric backends.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid cut: {0} coincides with an argument point")]
    InvalidCut(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("operands belong to different point configurations")]
    ConfigMismatch,
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("division by a fraction whose numerator is not a single monomial")]
    NonMonomialDivisor,
    #[error("not loxodromic: {0}")]
    NotLoxodromic(String),
    #[error("scale-dependent: fraction is not balanced")]
    ScaleDependent,
    #[error("degenerate evaluation: {0}")]
    DegenerateEvaluation(String),
    #[error("multivalued: oper holonomy is not trivial in PSL")]
    Multivalued,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
