use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet size {0} out of range (2..=4)")]
    AlphabetSize(usize),
    #[error("letter {letter} out of range for alphabet of size {size}")]
    LetterRange { letter: u8, size: usize },
    #[error("invalid digit {0:?} in word")]
    BadDigit(char),
    #[error("morphism parse error at line {line}: {msg}")]
    MorphismParse { line: usize, msg: String },
    #[error("morphism domain has no image for letter {0}")]
    MissingImage(u8),
    #[error("empty image for letter {0}")]
    EmptyImage(u8),
    #[error("alphabet mismatch: word over size-{word} alphabet, morphism domain size {domain}")]
    DomainMismatch { word: usize, domain: usize },
    #[error("morphism is not uniform (image lengths {0:?})")]
    NotUniform(Vec<usize>),
    #[error("morphism is not prolongable on letter {0}")]
    NotProlongable(u8),
    #[error("{p} does not divide |h({letter})| = {len}")]
    Divisibility { p: usize, letter: u8, len: usize },
    #[error("image of letter {0} does not begin with conjugation letter {1}")]
    ConjugacyPrefix(u8, u8),
    #[error("witness for letter {0} is not a suffix of its image")]
    WitnessNotSuffix(u8),
    #[error("enumeration of {count} candidates exceeds cap {cap}")]
    EnumerationCap { count: u128, cap: u128 },
    #[error("kernel closure exceeded state cap {cap}; stream may not be 2-automatic or compare_len too small")]
    StateCap { cap: usize },
    #[error("kernel closure needs stream prefix of {needed} letters, above hard cap {cap}")]
    PrefixCap { needed: u64, cap: u64 },
    #[error("vtm factor set not stabilized: {short} factors at prefix {short_len}, {long} at prefix {long_len}")]
    FactorSetUnstable { short: usize, long: usize, short_len: usize, long_len: usize },
    #[error("conflicting fixed letters at position {index}: {a} vs {b}")]
    ConstraintConflict { index: usize, a: u8, b: u8 },
    #[error("search cap {cap} reached without exhausting the tree")]
    SearchCapReached { cap: usize },
    #[error("no catalog case morphism of length <= 29 divides p = {0}")]
    NoCaseDivisor(usize),
    #[error("catalog asset {0} missing")]
    AssetMissing(String),
    #[error("catalog asset {name} checksum mismatch (got {got})")]
    AssetChecksum { name: String, got: String },
    #[error("catalog entry {name}: {msg}")]
    CatalogInvalid { name: String, msg: String },
    #[error("position spec invalid: {0}")]
    PositionSpec(String),
    #[error("dfao parse error at line {line}: {msg}")]
    DfaoParse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
