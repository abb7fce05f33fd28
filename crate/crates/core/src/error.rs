use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rank {rank} out of range for a space of {size} words")]
    RankOutOfRange { rank: usize, size: usize },

    #[error("space U_{{{length},{alphabet}}} is too large to index")]
    SpaceTooLarge { length: usize, alphabet: usize },

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("ground mismatch: words of length {left} and {right}")]
    GroundMismatch { left: usize, right: usize },

    #[error("colorings live on different spaces")]
    SpaceMismatch,

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("search budget exceeded at size {at}; value lies in [{lower}, {}]", upper.map(|u| u.to_string()).unwrap_or_else(|| "?".into()))]
    BudgetExceeded {
        at: usize,
        lower: usize,
        upper: Option<usize>,
    },

    #[error("checkpoint {0}")]
    Checkpoint(String),

    #[error("stage {stage} failed: {reason}")]
    StageFailed { stage: String, reason: String },

    #[error("count-vector coloring is not well defined: {0}")]
    WellDefinedness(String),

    #[error("chain output is not invariant: {0}")]
    ChainViolation(String),

    #[error("a value for W_C({dims}, {side}) is required")]
    MissingWValue { dims: usize, side: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
