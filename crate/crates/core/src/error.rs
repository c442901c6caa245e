use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("operator word must not be empty")]
    EmptyWord,

    #[error("invalid operator letter {letter:?} at offset {offset}; expected 'U' or 'D'")]
    InvalidLetter { letter: char, offset: usize },

    #[error("distance {0} is outside the domain; distances between maxima start at 2")]
    DistanceOutOfDomain(u64),

    #[error("word length {len} exceeds the enumeration bound of {max}")]
    WordTooLong { len: usize, max: usize },

    #[error("oracle distance {0} outside the enumerable range 2..=8")]
    OracleRange(u64),

    #[error("tie between equal values at position {position}")]
    Tie { position: usize },

    #[error("non-finite value at position {position}")]
    NonFinite { position: usize },

    #[error("positions must be strictly increasing (position {position} follows {previous})")]
    NonMonotonePositions { previous: usize, position: usize },

    #[error("distance {0} is impossible between strict extrema")]
    ImpossibleDistance(u64),

    #[error("histogram is empty")]
    EmptyHistogram,

    #[error("chi-square test needs at least 2 bins, got {0}")]
    TooFewBins(usize),

    #[error("sample of {n} is below the minimum of {min} for this test")]
    SampleTooSmall { n: u64, min: u64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("generator state {state} is invalid: {reason}")]
    InvalidState { state: u64, reason: &'static str },

    #[error("{path}: line {line}: cannot parse {text:?} as a number")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        text: String,
    },

    #[error("{path}: truncated 32-bit word at byte offset {offset} ({len} trailing bytes)")]
    TruncatedWord {
        path: PathBuf,
        offset: usize,
        len: usize,
    },

    #[error("{0}: file is empty")]
    EmptyFile(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
