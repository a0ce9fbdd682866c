use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: expected {expected}")]
    Syntax { position: usize, expected: String },

    #[error("unknown catalog name `{0}`")]
    UnknownName(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("enumerator `{source_name}` is not strictly increasing at {value}")]
    NotIncreasing { source_name: String, value: u64 },

    #[error("blocks of `{source_name}` overlap: block {index} starts at {min} but the previous block ends at {prev_max}")]
    BlocksOverlap {
        source_name: String,
        index: usize,
        min: u64,
        prev_max: u64,
    },

    #[error("certificate of `{source_name}` contradicted: {detail}")]
    Certificate { source_name: String, detail: String },

    #[error("{0}")]
    Horizon(String),

    #[error("invalid prefix: {0}")]
    InvalidPrefix(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("unknown class `{0}`")]
    UnknownClass(String),

    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    #[error("hierarchy violation: {0}")]
    Hierarchy(String),

    #[error("invalid decomposition: {0}")]
    Decomposition(String),

    #[error("block size bound violated: block of size {size} exceeds {bound}")]
    SizeBound { size: usize, bound: usize },

    #[error("invalid rational `{0}`")]
    Rational(String),

    #[error("invalid bit string `{0}`")]
    BitString(String),

    #[error("tree family has no set for node `{0}`")]
    MissingNode(String),

    #[error("no qualifying run of length {length} with gaps <= {max_gap} in branch set at depth {depth} within horizon {horizon}")]
    NoQualifyingRun {
        depth: usize,
        length: usize,
        max_gap: u64,
        horizon: u64,
    },

    #[error("invalid sequence: {0}")]
    Sequence(String),
}
