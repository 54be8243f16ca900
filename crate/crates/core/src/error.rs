use thiserror::Error;

/// Errors raised by the complexity kernel.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The zero function has no partial automaton with a live state.
    #[error("the zero function has no automaton")]
    NoAutomaton,

    /// Nothing can be constructed: only the zero function exists (c = 1), or
    /// a search refuted every candidate.
    #[error("no witness exists for these parameters")]
    NoWitness,

    /// The level sizes never switch from prefix-counting to function-counting.
    #[error("no crossover: b^n = {words} words cannot carry c - 1 = {colors} nonzero colors")]
    NoCrossover { words: String, colors: String },

    #[error("no maximal-complexity count: b^n < c - 1")]
    NoMax,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A Dedekind number that is not built in (and was not supplied) is needed.
    #[error("|F_{k}^-| is required to evaluate the monotone bound at n = {n}")]
    NeedDedekind { n: u32, k: u32 },

    #[error("|C_{k}| is required to evaluate the complete-simple-game bound at n = {n}")]
    NeedCsgCount { n: u32, k: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
