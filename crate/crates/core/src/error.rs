use thiserror::Error;

/// Errors raised by the engine.
///
/// Variants are grouped by the layer that raises them. [`Error::Verification`]
/// and [`Error::Inconsistency`] indicate that an exact check contradicted an
/// expected mathematical fact and must never be suppressed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field of size {size} exceeds cardinality cap {cap}")]
    FieldTooLarge { size: u128, cap: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("the zero element has no multiplicative order")]
    ZeroOrder,
    #[error("{order} does not divide {group_order}")]
    OrderNotDivisor { order: u64, group_order: u64 },
    #[error("no embedding of F_{from} into F_{to}")]
    NoEmbedding { from: u64, to: u64 },
    #[error("polynomial is not irreducible")]
    Reducible,

    #[error("invalid group specification: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("generator {0} is not invertible")]
    NotInvertible(usize),
    #[error("group order exceeds enumeration cap {cap}")]
    CapExceeded { cap: u64 },
    #[error("matrix entries do not fit the packed element key ({bits} bits needed)")]
    KeyTooWide { bits: u32 },
    #[error("element is not in the group")]
    NotInGroup,

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("variable x{0} has no assigned value")]
    MissingVariable(u32),
    #[error("word arity {arity} unsupported by {strategy} strategy")]
    UnsupportedArity { arity: u32, strategy: &'static str },
    #[error("groups differ")]
    GroupMismatch,

    #[error("too many classes for character table: {classes} > {cap}")]
    TooManyClasses { classes: usize, cap: usize },
    #[error("character table computation failed: {0}")]
    Dixon(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("fatal inconsistency: {0}")]
    Inconsistency(String),

    #[error("malformed bundle: {0}")]
    Malformed(String),
    #[error("bundle version {found} incompatible with {expected}")]
    VersionMismatch { found: String, expected: String },
    #[error("content hash mismatch: stored {stored}, computed {computed}")]
    HashMismatch { stored: String, computed: String },
    #[error("bundle consistency check failed: {0}")]
    Consistency(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
