use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the solver library.
///
/// `Invariant` marks conditions that are impossible when the callers uphold
/// their documented preconditions; seeing one means a bug, not bad input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for a digraph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("({0}, {1}) is not an arc of the digraph")]
    ArcNotInGraph(usize, usize),

    #[error("vertex {0} is not a vertex of the tree")]
    NotATreeVertex(usize),

    #[error("parent map is not a valid out-tree: {0}")]
    MalformedTree(String),

    #[error("out-tree covers {got} of {need} vertices, so it is not spanning")]
    NotSpanning { got: usize, need: usize },

    #[error("root {root} does not reach all vertices")]
    RootUnreachable { root: usize },

    #[error("1-change for ({0}, {1}) would create a cycle")]
    WouldCreateCycle(usize, usize),

    #[error("the root has no parent arc to exchange")]
    RootHasNoParent,

    #[error("({0}, {1}) is already a tree arc")]
    ArcAlreadyInTree(usize, usize),

    #[error("not a dipath from the tree root: {0}")]
    NotADipath(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
