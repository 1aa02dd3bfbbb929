use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("width must be at least 1")]
    ZeroWidth,

    #[error(
        "number of broken threads must satisfy 1 <= n <= width (got n = {n}, width = {width})"
    )]
    BrokenCount { n: usize, width: usize },

    #[error("position {pos} is outside 0..={max}")]
    Position { pos: usize, max: usize },

    #[error("probability {0} is outside [0, 1]")]
    ProbabilityRange(String),

    #[error("cannot parse {0:?} as a probability (expected a/b or a decimal)")]
    ParseProbability(String),

    #[error("unknown number mode {0:?} (expected exact or float)")]
    ParseMode(String),

    #[error("width {width} exceeds the pattern enumeration cap of {cap}; use the extremes distribution instead")]
    EnumerationCap { width: usize, cap: usize },

    #[error("{patterns} breakage patterns exceed the enumeration cap of {cap}")]
    PatternCap { patterns: u128, cap: u128 },

    #[error("at least one round is required")]
    NoRounds,

    #[error("horizons must be nonempty and strictly ascending")]
    Horizons,
}

pub type Result<T> = std::result::Result<T, Error>;
