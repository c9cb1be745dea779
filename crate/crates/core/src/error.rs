use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("prefix exhausted: needed {needed} symbols, only {available} available")]
    PrefixExhausted { needed: u64, available: u64 },

    #[error("wedge point side tag does not match the system: {0}")]
    SideMismatch(String),

    #[error("distance undecidable: points agree on all {0} inspected symbols without an equality certificate")]
    Undecidable(u64),

    #[error("inadmissible cell: {0}")]
    InadmissibleCell(String),

    #[error("bad delta {delta}: must satisfy 0 < delta < {diameter}")]
    BadDelta { delta: f64, diameter: f64 },

    #[error("empty set")]
    EmptySet,

    #[error("no run of length {0} inside the window")]
    NoRuns(u64),

    #[error("budget exceeded: {what} needs {needed}, cap is {cap}")]
    BudgetExceeded { what: &'static str, needed: u128, cap: u128 },

    #[error("sample too small: {0}")]
    SampleTooSmall(String),

    #[error("operation requires a subshift")]
    NotASubshift,

    #[error("window overflow: last window ends at {end}, limit is {limit}")]
    WindowOverflow { end: u64, limit: u64 },

    #[error("prefix of length {requested} exceeds the materialization limit {limit}")]
    PrefixLimit { requested: u64, limit: u64 },

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}
