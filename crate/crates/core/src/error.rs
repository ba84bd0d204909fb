use std::io;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller broke a documented precondition (e.g. `lo > hi`).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An input exceeded a hard guard such as the exact-rational limit.
    #[error("capacity exceeded: {what} is {value}, limit is {limit}")]
    Capacity {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("input is not valid UTF-8")]
    InvalidUtf8,

    #[error("corpus is empty")]
    EmptyCorpus,

    /// An on-disk index could not be decoded or does not match its corpus.
    #[error("invalid index file: {0}")]
    IndexFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
