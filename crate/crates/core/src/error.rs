use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("duplicate node label `{0}`")]
    DuplicateLabel(String),

    #[error("graph has {0} nodes; at most {max} are supported", max = crate::MAX_NODES)]
    TooManyNodes(usize),

    #[error("self-loop on `{0}`")]
    SelfLoop(String),

    #[error("more than one edge between `{0}` and `{1}`")]
    DuplicateEdge(String, String),

    #[error("edge `{0}` - `{1}` is not undirected")]
    NotUndirected(String, String),

    #[error("orienting `{tail}` -> `{head}` closes a directed cycle")]
    Cycle { tail: String, head: String },

    #[error("graph is not a DAG: {0}")]
    NotADag(String),

    #[error("graph is not undirected: it has directed edges")]
    NotUndirectedGraph,

    #[error("invalid separation query: {0}")]
    InvalidQuery(String),

    #[error("collider conflict on {}", format_conflicts(.0))]
    ColliderConflict(Vec<ColliderConflict>),

    #[error("node `{node}` is not removable: {reason}")]
    NotRemovable { node: String, reason: String },

    #[error("graph admits no consistent extension: {0}")]
    Inextensible(String),

    #[error("extension enumeration bound exceeded: {0}")]
    EnumerationBound(String),

    #[error("node sets differ: {0}")]
    NodeSetMismatch(String),

    #[error("{0} variables require an explicit conditioning-set bound")]
    MaxCondRequired(usize),

    #[error("singular correlation submatrix for {0}")]
    SingularMatrix(String),

    #[error("insufficient samples: need more than {needed}, have {have}")]
    InsufficientSamples { needed: usize, have: usize },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One offending unshielded triple pair: both `(a, b, w)` patterns that tried to
/// orient the edge between `edge.0` and `edge.1` in opposite directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColliderConflict {
    pub edge: (String, String),
    pub triples: Vec<(String, String, String)>,
}

fn format_conflicts(c: &[ColliderConflict]) -> String {
    c.iter()
        .map(|c| {
            let t: Vec<String> = c
                .triples
                .iter()
                .map(|(a, w, b)| format!("{a}->{w}<-{b}"))
                .collect();
            format!("{}-{} [{}]", c.edge.0, c.edge.1, t.join(", "))
        })
        .collect::<Vec<_>>()
        .join("; ")
}
