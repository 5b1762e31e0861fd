use thiserror::Error;

use crate::decomposition::Violation;
use crate::multigraph::Vertex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {0} is not in the graph")]
    MissingVertex(Vertex),
    #[error("vertex {0} already exists")]
    DuplicateVertex(Vertex),
    #[error("loop at vertex {0}")]
    Loop(Vertex),
    #[error("edge {0}-{1} has multiplicity zero")]
    ZeroMultiplicity(Vertex, Vertex),
    #[error("vertex sets overlap at vertex {0}")]
    Overlap(Vertex),
    #[error("vertex {vertex} cannot be dissolved: degree {degree}, {neighbors} distinct neighbors")]
    NotDissolvable {
        vertex: Vertex,
        degree: u64,
        neighbors: usize,
    },
    #[error("vertex set is empty")]
    EmptySet,
    #[error("fresh vertex {0} is already used outside the identified set")]
    FreshInUse(Vertex),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph needs at least {0} vertices")]
    TooSmall(usize),
    #[error("({0}, {1}) is not a tree edge")]
    NotTreeEdge(usize, usize),
    #[error("node {0} does not exist")]
    UnknownNode(usize),
    #[error("invalid tree-cut decomposition: {}", format_violations(.0))]
    InvalidDecomposition(Vec<Violation>),
    #[error("invalid tree decomposition: {0}")]
    InvalidTreeDecomposition(String),
    #[error("input has {size} vertices, the cap is {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
