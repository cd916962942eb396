//! Recovery of directed acyclic graph structure from conditional-independence
//! information.
//!
//! The pipeline ([`recovery::recover`]) finds the skeleton by searching for
//! separating sets, orients unshielded colliders, then closes the orientations
//! under three propagation rules. The [`extension`] module turns the resulting
//! partially directed graph back into DAGs, and [`separation`] provides the
//! trail semantics on both kinds of graph.

pub mod error;
pub mod extension;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod nodeset;
pub mod oracle;
pub mod par;
pub mod recovery;
pub mod separation;
pub mod synthesis;

pub use error::{Error, Result};
pub use extension::{
    derive_dag, enumerate_extensions, markov_equivalent, removable_nodes, removal_sequence,
    remove_node, ExtensionLimits, RemovalRecord,
};
pub use graph::{Dag, Graph, Pdag, SepsetTable, UGraph};
pub use nodeset::{NodeId, NodeSet, MAX_NODES};
pub use oracle::{
    counting, fisher_z_oracle, perfect_oracle, CountingOracle, Dataset, FisherZOracle,
    IndependenceOracle, OracleStats, PerfectOracle,
};
pub use par::Execution;
pub use recovery::{
    close_orientations, find_skeleton, orient_colliders, recover, rule_iic, rule_iv, rule_v,
    RecoveryOptions, RecoveryResult, Rule,
};
pub use separation::{
    active_ptrail_exists, active_trail_exists, connected_in_every_extension, d_separated,
    SeparationQuery,
};
pub use synthesis::{random_dag, sample, LinearModel};
