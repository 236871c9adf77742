use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: malformed JSON: {message}")]
    MalformedLine { line: usize, message: String },

    #[error("line {line}: unknown label {label:?} (expected \"member\" or \"nonmember\")")]
    UnknownLabel { line: usize, label: String },

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error(
        "corpus needs at least one member and one nonmember (have {members} and {nonmembers})"
    )]
    SingleClass { members: usize, nonmembers: usize },

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("sample {id:?} has no meta field {key:?}")]
    MissingGroupKey { id: String, key: String },

    #[error("invalid n-gram range [{lo}, {hi}]: need 1 <= lo <= hi <= 5")]
    InvalidNGramRange { lo: usize, hi: usize },

    #[error("empty vocabulary after min_df={min_df} filtering; try min_df=1")]
    EmptyVocabulary { min_df: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite score for sample {0:?}")]
    NonFiniteScore(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}
