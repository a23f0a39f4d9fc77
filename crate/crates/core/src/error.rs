use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad arguments or malformed data supplied by the caller.
    #[error("invalid input: {0}")]
    Input(String),

    /// Edge-list parse failure, with the 1-based line number.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The request exceeds a hard size cap of an exhaustive routine.
    #[error("{what} supports {cap} at most, got {got}")]
    Capability {
        what: &'static str,
        cap: String,
        got: String,
    },

    /// A generator could not produce even a minimal output.
    #[error("construction failed: {0}")]
    Construction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
