use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sequence is empty")]
    EmptySequence,

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("`*` is reserved for the wildcard and cannot be used as a symbol name")]
    ReservedSymbol,

    #[error("pattern must contain at least one concrete symbol")]
    EmptyPattern,

    #[error("window at position {pos} with period {period} exceeds sequence length {len}")]
    Range {
        pos: usize,
        period: usize,
        len: usize,
    },

    #[error("symbol `{0}` never occurs, its information is infinite")]
    InfiniteInfo(String),

    #[error("row `{row}` of the compatibility matrix sums to {sum}, expected 1")]
    Stochasticity { row: String, sum: f64 },

    #[error("entry C({row},{observed}) = {value} is not a probability")]
    Probability {
        row: String,
        observed: String,
        value: f64,
    },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("planted region {second} overlaps planted region {first}")]
    PlantOverlap { first: usize, second: usize },

    #[error("planted region {index} does not fit in a sequence of length {len}")]
    PlantOutOfRange { index: usize, len: usize },

    #[error("input too large for the brute-force oracle: {0}")]
    OracleTooLarge(String),
}
