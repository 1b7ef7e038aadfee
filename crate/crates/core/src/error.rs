use thiserror::Error;

/// Errors raised by automaton constructions, checks and parsers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("automaton must be complete")]
    NotComplete,

    #[error("automaton must be deterministic")]
    NotDeterministic,

    #[error("acceptance condition is not generalized Büchi: {0}")]
    NotGba(String),

    #[error("acceptance condition is not in disjunctive normal form: {0}")]
    NotDnf(String),

    #[error("acceptance condition contains a Fin atom")]
    HasFin,

    #[error("alphabets differ: {0} vs {1} atomic propositions")]
    AlphabetMismatch(usize, usize),

    #[error("automaton must have exactly one initial state, found {0}")]
    InitialStates(usize),

    #[error("automaton is not limit-deterministic: {0}")]
    NotLimitDeterministic(String),

    #[error("size limit exceeded: {0}")]
    Limit(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }
}
