//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty vocabulary: no tokens left after cleaning")]
    EmptyVocabulary,

    #[error("no in-vocabulary tokens in document")]
    NoInVocabularyTokens,

    #[error("more topics than tokens: k = {k} but the corpus has {tokens} tokens")]
    MoreTopicsThanTokens { k: usize, tokens: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("impossible observation at position {position}: all emission probabilities are zero")]
    ImpossibleObservation { position: usize },

    #[error("insufficient sequence: need at least 2 usable tokens, found {found}")]
    InsufficientSequence { found: usize },

    #[error("non-unique equilibrium: transition matrix is reducible")]
    NonUniqueEquilibrium,

    #[error("EM did not stabilize within {iterations} iterations")]
    NoStabilization { iterations: usize },

    #[error("singular design matrix")]
    SingularDesign,

    #[error("response family mismatch: {0}")]
    FamilyMismatch(String),

    #[error("degenerate labels: both classes must be present")]
    DegenerateLabels,

    #[error("empty fold in cross-validation")]
    EmptyFold,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
