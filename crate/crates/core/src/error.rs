use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain of a numerical kernel or formula.
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Parse failure in a scenario file, with the 1-based line number.
    #[error("config line {line}: {key}: {msg}")]
    Config { line: usize, key: String, msg: String },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    /// A closed form was requested outside the regime it was derived for.
    #[error("closed form not applicable: {0}")]
    Regime(String),

    #[error("rank-deficient channel matrix")]
    RankDeficient,

    #[error("invalid cell coloring: {0}")]
    Coloring(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { func, msg: msg.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
