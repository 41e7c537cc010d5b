use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("byte {value:#04x} at position {position} is outside the 7-bit ASCII range")]
    NonAscii { position: usize, value: u8 },

    #[error("length mismatch: {left} bits vs {right} bits")]
    LengthMismatch { left: usize, right: usize },

    #[error("bit length {0} is not a multiple of 4")]
    NotNibbleAligned(usize),

    #[error("invalid hex digit {digit:?} at position {position} (uppercase 0-9A-F expected)")]
    InvalidHex { position: usize, digit: char },

    #[error("invalid bit character {digit:?} at position {position}")]
    InvalidBit { position: usize, digit: char },

    #[error("message is empty")]
    EmptyMessage,

    #[error("key is empty")]
    EmptyKey,

    #[error("length {len} is not a positive multiple of {block}")]
    NotMultiple { len: usize, block: usize },

    #[error("index {index} is outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("strategy exhausted")]
    StrategyExhausted,

    #[error("exhaustive enumeration is limited to n <= {max}, got n = {n}")]
    TooLarge { n: usize, max: usize },

    #[error("dimension mismatch: expected {expected} bits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("map cannot be inverted at component {component}")]
    NotInvertible { component: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
