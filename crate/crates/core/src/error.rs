use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("instance too large for exhaustive search: n = {n} exceeds {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("edge {{{0}, {1}}} already inserted")]
    DuplicateEdge(usize, usize),

    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),

    #[error("invalid edge order: {0}")]
    InvalidOrder(String),

    #[error("operation requires at least one conflict")]
    NoConflict,

    #[error("no analytic longest-path formula for this graph")]
    UnknownFamily,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
