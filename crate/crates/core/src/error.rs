use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("node {node} is out of range 1..={n}")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("edge ({0}, {1}) does not exist")]
    MissingEdge(usize, usize),

    #[error("node subset must be nonempty")]
    EmptySubset,

    #[error("graph has {n} nodes; at most {max} are supported by this operation")]
    TooLarge { n: usize, max: usize },

    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
