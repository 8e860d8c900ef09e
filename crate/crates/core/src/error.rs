use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed formula or rule text.
    #[error("{line}:{col}: expected {}; found {found}", expected.join(" or "))]
    Syntax {
        line: usize,
        col: usize,
        expected: Vec<String>,
        found: String,
    },

    /// An uppercase token that is not one of the known operators (N, S, K1, K2, K[..]).
    #[error("{line}:{col}: unknown operator `{text}`")]
    UnknownOperator {
        line: usize,
        col: usize,
        text: String,
    },

    /// A rule with nothing before the `/`.
    #[error("rule has no premises before `/`")]
    EmptyPremises,

    /// Formula mentions an atom the model does not value.
    #[error("atom `{0}` is not a letter of the model")]
    UnknownAtom(String),

    /// Model or profile file failed validation; the message is path-qualified.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// Shifting is only meaning-preserving for uniform bounds.
    #[error("cannot shift a model with a non-uniform bound")]
    NonUniformShift,

    /// A construction or search would exceed its configured budget.
    /// `needed` is the theoretical count, `budget` the configured limit.
    #[error("{what} would need {needed} entries, budget is {budget}")]
    CapacityExceeded {
        what: String,
        needed: u128,
        budget: u128,
    },

    /// Agent models in a profile do not share letters, bound and shape.
    #[error("incompatible agents: {0}")]
    IncompatibleAgents(String),

    /// Knowledge operators nested inside shared-knowledge arguments.
    #[error("nested knowledge operators are not supported in shared-knowledge evaluation")]
    NestedKnowledgeUnsupported,
}

pub type Result<T> = std::result::Result<T, Error>;
