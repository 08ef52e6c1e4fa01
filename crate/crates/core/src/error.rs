use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("production body `{body}` of `{nonterminal}` is not in Greibach normal form")]
    NotGnf { nonterminal: String, body: String },

    #[error("operation requires the Boolean semiring")]
    NonBooleanSemiring,

    #[error("unknown nonterminal `{0}`")]
    UnknownNonterminal(String),

    #[error("unknown letter `{0}`")]
    UnknownLetter(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("unknown variable `{0}` in assignment")]
    UnknownVariable(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("body of `mu {0}` is not guarded")]
    Unguarded(String),

    #[error("expression has free variables: {0}")]
    NotClosed(String),

    #[error("variable `{0}` is bound more than once")]
    DuplicateBinder(String),

    #[error("alphabets differ: [{left}] vs [{right}]")]
    AlphabetMismatch { left: String, right: String },

    #[error("semirings differ: {left} vs {right}")]
    SemiringMismatch { left: String, right: String },

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
