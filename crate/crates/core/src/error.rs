use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Caller supplied arguments outside an operation's domain.
    #[error("invalid input: {0}")]
    Input(String),

    /// The request is well formed but exceeds what the exhaustive routes can hold.
    #[error("capacity exceeded: {what} is limited to {limit}, got {requested}")]
    Capacity {
        what: &'static str,
        limit: u64,
        requested: u64,
    },

    /// A checked integer operation would have wrapped.
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    /// Two independent routes disagreed, or a computed quantity violated an
    /// invariant it must satisfy.
    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn verification(msg: impl Into<String>) -> Self {
        Error::Verification(msg.into())
    }

    pub(crate) fn capacity(what: &'static str, limit: u64, requested: u64) -> Self {
        Error::Capacity {
            what,
            limit,
            requested,
        }
    }
}

/// Fails with a capacity error when `requested > limit`.
pub(crate) fn ensure_capacity(what: &'static str, limit: u64, requested: u64) -> Result<()> {
    if requested > limit {
        Err(Error::capacity(what, limit, requested))
    } else {
        Ok(())
    }
}
