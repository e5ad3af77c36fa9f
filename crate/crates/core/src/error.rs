use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("unknown arc ({0},{1})")]
    UnknownArc(usize, usize),
    #[error("size cap exceeded: {what} = {got}, cap {cap}")]
    CapExceeded {
        what: &'static str,
        got: usize,
        cap: usize,
    },
    #[error("node budget exhausted after {0} nodes")]
    BudgetExhausted(u64),
    #[error("transversal precondition violated: {0}")]
    TransversalPrecondition(String),
    #[error("transversal search exhausted without s/2 independent slices (contradicts the shift-vector argument): {0}")]
    TransversalExhausted(String),
    #[error("parse error at {file}:{line}:{col}: {msg}")]
    Parse {
        file: String,
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn parse(file: &str, line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            file: file.to_string(),
            line,
            col,
            msg: msg.into(),
        }
    }
}
