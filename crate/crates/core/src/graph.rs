//! Value-semantics graph types: [`Dag`], [`UGraph`] and the mixed [`Pdag`].
//!
//! All three share a label table and store adjacency as one [`NodeSet`] per node.
//! Unordered pairs are always reported with the smaller index first, and every
//! edge listing is sorted.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::nodeset::{NodeId, NodeSet, MAX_NODES};

/// Read access shared by every graph type.
pub trait Graph {
    fn labels(&self) -> &[String];

    /// Nodes linked to `v` by any edge.
    ///
    /// Panics if `v` is out of range; use [`Graph::adjacents`] for checked access.
    fn adjacent_to(&self, v: NodeId) -> NodeSet;

    fn node_count(&self) -> usize {
        self.labels().len()
    }

    fn nodes(&self) -> NodeSet {
        NodeSet::full(self.node_count())
    }

    fn label(&self, v: NodeId) -> &str {
        &self.labels()[v.0]
    }

    fn node(&self, label: &str) -> Result<NodeId> {
        self.labels()
            .iter()
            .position(|l| l == label)
            .map(NodeId)
            .ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    fn check_node(&self, v: NodeId) -> Result<()> {
        if v.0 < self.node_count() {
            Ok(())
        } else {
            Err(Error::UnknownNode(v.to_string()))
        }
    }

    /// All nodes linked to `v` by any edge, in any direction.
    fn adjacents(&self, v: NodeId) -> Result<NodeSet> {
        self.check_node(v)?;
        Ok(self.adjacent_to(v))
    }

    fn is_adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.adjacent_to(a).contains(b)
    }

    fn label_set(&self, s: NodeSet) -> Vec<String> {
        s.iter().map(|v| self.label(v).to_string()).collect()
    }
}

fn validate_labels(labels: &[String]) -> Result<()> {
    if labels.len() > MAX_NODES {
        return Err(Error::TooManyNodes(labels.len()));
    }
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

fn ordered(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// A partially directed graph: disjoint sets of directed and undirected edges
/// with an acyclic directed part.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pdag {
    labels: Vec<String>,
    parents: Vec<NodeSet>,
    children: Vec<NodeSet>,
    undirected: Vec<NodeSet>,
}

impl Graph for Pdag {
    fn labels(&self) -> &[String] {
        &self.labels
    }

    fn adjacent_to(&self, v: NodeId) -> NodeSet {
        self.parents[v.0]
            .union(self.children[v.0])
            .union(self.undirected[v.0])
    }
}

impl Pdag {
    /// An edgeless graph over the given labels.
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        validate_labels(&labels)?;
        let n = labels.len();
        Ok(Pdag {
            labels,
            parents: vec![NodeSet::EMPTY; n],
            children: vec![NodeSet::EMPTY; n],
            undirected: vec![NodeSet::EMPTY; n],
        })
    }

    /// Builds a graph from labelled edge lists, validating every invariant.
    pub fn from_labeled_edges(
        nodes: &[&str],
        directed: &[(&str, &str)],
        undirected: &[(&str, &str)],
    ) -> Result<Self> {
        let mut g = Pdag::new(nodes.iter().copied())?;
        for &(a, b) in directed {
            let (a, b) = (g.node(a)?, g.node(b)?);
            g.add_directed(a, b)?;
        }
        for &(a, b) in undirected {
            let (a, b) = (g.node(a)?, g.node(b)?);
            g.add_undirected(a, b)?;
        }
        Ok(g)
    }

    #[inline]
    pub fn parents_of(&self, v: NodeId) -> NodeSet {
        self.parents[v.0]
    }

    #[inline]
    pub fn children_of(&self, v: NodeId) -> NodeSet {
        self.children[v.0]
    }

    /// Nodes joined to `v` by an undirected edge.
    #[inline]
    pub fn neighbors_of(&self, v: NodeId) -> NodeSet {
        self.undirected[v.0]
    }

    pub fn has_directed(&self, tail: NodeId, head: NodeId) -> bool {
        self.children[tail.0].contains(head)
    }

    pub fn has_undirected(&self, a: NodeId, b: NodeId) -> bool {
        self.undirected[a.0].contains(b)
    }

    fn check_new_link(&self, a: NodeId, b: NodeId) -> Result<()> {
        self.check_node(a)?;
        self.check_node(b)?;
        if a == b {
            return Err(Error::SelfLoop(self.labels[a.0].clone()));
        }
        if self.is_adjacent(a, b) {
            return Err(Error::DuplicateEdge(
                self.labels[a.0].clone(),
                self.labels[b.0].clone(),
            ));
        }
        Ok(())
    }

    /// Adds `tail -> head`, rejecting self-loops, duplicates and cycles.
    pub fn add_directed(&mut self, tail: NodeId, head: NodeId) -> Result<()> {
        self.check_new_link(tail, head)?;
        if self.directed_reaches(head, tail) {
            return Err(self.cycle_error(tail, head));
        }
        self.children[tail.0].insert(head);
        self.parents[head.0].insert(tail);
        Ok(())
    }

    pub fn add_undirected(&mut self, a: NodeId, b: NodeId) -> Result<()> {
        self.check_new_link(a, b)?;
        self.undirected[a.0].insert(b);
        self.undirected[b.0].insert(a);
        Ok(())
    }

    /// Turns the undirected edge `tail - head` into `tail -> head`.
    ///
    /// Fails if the pair is not currently undirected or if the new arrow would
    /// close a directed cycle; the graph is unchanged on failure.
    pub fn orient(&mut self, tail: NodeId, head: NodeId) -> Result<()> {
        self.check_node(tail)?;
        self.check_node(head)?;
        if !self.has_undirected(tail, head) {
            return Err(Error::NotUndirected(
                self.labels[tail.0].clone(),
                self.labels[head.0].clone(),
            ));
        }
        if self.directed_reaches(head, tail) {
            return Err(self.cycle_error(tail, head));
        }
        self.undirected[tail.0].remove(head);
        self.undirected[head.0].remove(tail);
        self.children[tail.0].insert(head);
        self.parents[head.0].insert(tail);
        debug_assert!(self.check_invariants().is_ok());
        Ok(())
    }

    /// Non-mutating form of [`Pdag::orient`].
    pub fn oriented(&self, tail: NodeId, head: NodeId) -> Result<Pdag> {
        let mut g = self.clone();
        g.orient(tail, head)?;
        Ok(g)
    }

    fn cycle_error(&self, tail: NodeId, head: NodeId) -> Error {
        Error::Cycle {
            tail: self.labels[tail.0].clone(),
            head: self.labels[head.0].clone(),
        }
    }

    /// True if a directed path of length >= 1 leads from `from` to `to`.
    pub fn directed_reaches(&self, from: NodeId, to: NodeId) -> bool {
        self.directed_descendants(from).contains(to)
    }

    /// Nodes reachable from `v` along directed edges, excluding `v`.
    pub fn directed_descendants(&self, v: NodeId) -> NodeSet {
        self.closure(v, |u| self.children[u.0])
    }

    /// Nodes reachable from `v` along directed-forward or undirected edges,
    /// excluding `v`.
    pub fn possible_descendants(&self, v: NodeId) -> NodeSet {
        self.closure(v, |u| self.children[u.0].union(self.undirected[u.0]))
    }

    fn closure(&self, v: NodeId, step: impl Fn(NodeId) -> NodeSet) -> NodeSet {
        let mut seen = NodeSet::EMPTY;
        let mut frontier = step(v);
        while !frontier.is_empty() {
            seen = seen.union(frontier);
            let mut next = NodeSet::EMPTY;
            for u in frontier {
                next = next.union(step(u));
            }
            frontier = next.difference(seen);
        }
        seen.without(v)
    }

    /// Directed edges as `(tail, head)`, sorted.
    pub fn directed_edges(&self) -> Vec<(NodeId, NodeId)> {
        (0..self.node_count())
            .flat_map(|t| self.children[t].iter().map(move |h| (NodeId(t), h)))
            .collect()
    }

    /// Undirected edges with the smaller index first, sorted.
    pub fn undirected_edges(&self) -> Vec<(NodeId, NodeId)> {
        (0..self.node_count())
            .flat_map(|a| {
                self.undirected[a]
                    .iter()
                    .filter(move |b| b.0 > a)
                    .map(move |b| (NodeId(a), b))
            })
            .collect()
    }

    pub fn directed_count(&self) -> usize {
        self.children.iter().map(|s| s.len()).sum()
    }

    pub fn undirected_count(&self) -> usize {
        self.undirected.iter().map(|s| s.len()).sum::<usize>() / 2
    }

    pub fn edge_count(&self) -> usize {
        self.directed_count() + self.undirected_count()
    }

    pub fn is_fully_directed(&self) -> bool {
        self.undirected.iter().all(|s| s.is_empty())
    }

    /// Re-checks disjointness, symmetry and acyclicity of the directed part.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.node_count();
        for v in 0..n {
            let id = NodeId(v);
            let (p, c, u) = (self.parents[v], self.children[v], self.undirected[v]);
            if p.intersects(c) || p.intersects(u) || c.intersects(u) {
                return Err(Error::DuplicateEdge(
                    self.labels[v].clone(),
                    "(overlapping edge kinds)".into(),
                ));
            }
            if self.adjacent_to(id).contains(id) {
                return Err(Error::SelfLoop(self.labels[v].clone()));
            }
            for w in c {
                debug_assert!(self.parents[w.0].contains(id));
            }
            for w in u {
                debug_assert!(self.undirected[w.0].contains(id));
            }
        }
        if self.topological_order().is_none() {
            return Err(Error::NotADag("directed part has a cycle".into()));
        }
        Ok(())
    }

    /// A topological order of the directed part (ties broken by lowest index),
    /// or `None` if it has a cycle.
    pub fn topological_order(&self) -> Option<Vec<NodeId>> {
        let n = self.node_count();
        let mut placed = NodeSet::EMPTY;
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let ready = (0..n)
                .map(NodeId)
                .find(|&v| !placed.contains(v) && self.parents[v.0].is_subset(placed))?;
            placed.insert(ready);
            order.push(ready);
        }
        Some(order)
    }

    /// The undirected graph of adjacencies.
    pub fn skeleton(&self) -> UGraph {
        UGraph {
            labels: self.labels.clone(),
            neighbors: (0..self.node_count())
                .map(|v| self.adjacent_to(NodeId(v)))
                .collect(),
        }
    }

    /// The same graph without `v`; indices above `v` shift down by one.
    pub(crate) fn without_node(&self, v: NodeId) -> Pdag {
        let remap = |s: NodeSet| -> NodeSet {
            s.without(v)
                .iter()
                .map(|u| if u > v { NodeId(u.0 - 1) } else { u })
                .collect()
        };
        let keep = |i: &usize| *i != v.0;
        Pdag {
            labels: (0..self.node_count())
                .filter(keep)
                .map(|i| self.labels[i].clone())
                .collect(),
            parents: (0..self.node_count())
                .filter(keep)
                .map(|i| remap(self.parents[i]))
                .collect(),
            children: (0..self.node_count())
                .filter(keep)
                .map(|i| remap(self.children[i]))
                .collect(),
            undirected: (0..self.node_count())
                .filter(keep)
                .map(|i| remap(self.undirected[i]))
                .collect(),
        }
    }

    /// Converts to a [`Dag`] if no undirected edges remain.
    pub fn into_dag(self) -> Result<Dag> {
        Dag::try_from(self)
    }
}

/// A directed acyclic graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    inner: Pdag,
}

impl TryFrom<Pdag> for Dag {
    type Error = Error;

    fn try_from(g: Pdag) -> Result<Dag> {
        if !g.is_fully_directed() {
            return Err(Error::NotADag(format!(
                "{} undirected edges remain",
                g.undirected_count()
            )));
        }
        g.check_invariants()?;
        Ok(Dag { inner: g })
    }
}

impl Graph for Dag {
    fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    fn adjacent_to(&self, v: NodeId) -> NodeSet {
        self.inner.adjacent_to(v)
    }
}

impl Dag {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Ok(Dag {
            inner: Pdag::new(labels)?,
        })
    }

    pub fn from_labeled_edges(nodes: &[&str], edges: &[(&str, &str)]) -> Result<Self> {
        Dag::try_from(Pdag::from_labeled_edges(nodes, edges, &[])?)
    }

    pub fn add_edge(&mut self, tail: NodeId, head: NodeId) -> Result<()> {
        self.inner.add_directed(tail, head)
    }

    #[inline]
    pub fn parents_of(&self, v: NodeId) -> NodeSet {
        self.inner.parents_of(v)
    }

    #[inline]
    pub fn children_of(&self, v: NodeId) -> NodeSet {
        self.inner.children_of(v)
    }

    pub fn has_edge(&self, tail: NodeId, head: NodeId) -> bool {
        self.inner.has_directed(tail, head)
    }

    /// All nodes reachable from `v` by directed paths, excluding `v`.
    pub fn descendants(&self, v: NodeId) -> Result<NodeSet> {
        self.check_node(v)?;
        Ok(self.inner.directed_descendants(v))
    }

    /// `s` together with every ancestor of a member of `s`.
    pub fn ancestral_closure(&self, s: NodeSet) -> NodeSet {
        let mut seen = s;
        let mut frontier = s;
        while !frontier.is_empty() {
            let mut next = NodeSet::EMPTY;
            for v in frontier {
                next = next.union(self.inner.parents_of(v));
            }
            frontier = next.difference(seen);
            seen = seen.union(frontier);
        }
        seen
    }

    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        self.inner.directed_edges()
    }

    pub fn edge_count(&self) -> usize {
        self.inner.directed_count()
    }

    pub fn topological_order(&self) -> Vec<NodeId> {
        self.inner
            .topological_order()
            .expect("Dag invariant: directed part is acyclic")
    }

    pub fn skeleton(&self) -> UGraph {
        self.inner.skeleton()
    }

    /// Unshielded colliders `(a, w, b)` meaning `a -> w <- b` with `a < b`
    /// nonadjacent, sorted.
    pub fn unshielded_colliders(&self) -> Vec<(NodeId, NodeId, NodeId)> {
        unshielded_colliders(&self.inner)
    }

    pub fn as_pdag(&self) -> &Pdag {
        &self.inner
    }

    pub fn into_pdag(self) -> Pdag {
        self.inner
    }
}

/// Unshielded colliders `(a, w, b)` formed by directed edges only.
pub(crate) fn unshielded_colliders(g: &Pdag) -> Vec<(NodeId, NodeId, NodeId)> {
    let mut out = Vec::new();
    for w in 0..g.node_count() {
        let w = NodeId(w);
        let pa = g.parents_of(w);
        for a in pa {
            for b in pa.iter().filter(|&b| b > a) {
                if !g.is_adjacent(a, b) {
                    out.push((a, w, b));
                }
            }
        }
    }
    out.sort_by_key(|&(a, w, b)| (a, b, w));
    out
}

/// An undirected graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UGraph {
    labels: Vec<String>,
    neighbors: Vec<NodeSet>,
}

impl Graph for UGraph {
    fn labels(&self) -> &[String] {
        &self.labels
    }

    fn adjacent_to(&self, v: NodeId) -> NodeSet {
        self.neighbors[v.0]
    }
}

impl UGraph {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        validate_labels(&labels)?;
        let n = labels.len();
        Ok(UGraph {
            labels,
            neighbors: vec![NodeSet::EMPTY; n],
        })
    }

    /// The complete graph over `labels`.
    pub fn complete<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut g = UGraph::new(labels)?;
        let all = g.nodes();
        for v in 0..g.node_count() {
            g.neighbors[v] = all.without(NodeId(v));
        }
        Ok(g)
    }

    pub fn from_labeled_edges(nodes: &[&str], edges: &[(&str, &str)]) -> Result<Self> {
        let mut g = UGraph::new(nodes.iter().copied())?;
        for &(a, b) in edges {
            let (a, b) = (g.node(a)?, g.node(b)?);
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, a: NodeId, b: NodeId) -> Result<()> {
        self.check_node(a)?;
        self.check_node(b)?;
        if a == b {
            return Err(Error::SelfLoop(self.labels[a.0].clone()));
        }
        if self.neighbors[a.0].contains(b) {
            return Err(Error::DuplicateEdge(
                self.labels[a.0].clone(),
                self.labels[b.0].clone(),
            ));
        }
        self.neighbors[a.0].insert(b);
        self.neighbors[b.0].insert(a);
        Ok(())
    }

    /// Returns whether the edge was present.
    pub fn remove_edge(&mut self, a: NodeId, b: NodeId) -> bool {
        let had = self.neighbors[a.0].remove(b);
        self.neighbors[b.0].remove(a);
        had
    }

    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        (0..self.node_count())
            .flat_map(|a| {
                self.neighbors[a]
                    .iter()
                    .filter(move |b| b.0 > a)
                    .map(move |b| (NodeId(a), b))
            })
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(|s| s.len()).sum::<usize>() / 2
    }

    /// The same adjacencies as an all-undirected [`Pdag`].
    pub fn to_pdag(&self) -> Pdag {
        let n = self.node_count();
        Pdag {
            labels: self.labels.clone(),
            parents: vec![NodeSet::EMPTY; n],
            children: vec![NodeSet::EMPTY; n],
            undirected: self.neighbors.clone(),
        }
    }
}

impl TryFrom<Pdag> for UGraph {
    type Error = Error;

    fn try_from(g: Pdag) -> Result<UGraph> {
        if g.directed_count() > 0 {
            return Err(Error::NotUndirectedGraph);
        }
        Ok(UGraph {
            labels: g.labels,
            neighbors: g.undirected,
        })
    }
}

/// Witness separating sets recorded for each nonadjacent pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SepsetTable {
    entries: BTreeMap<(NodeId, NodeId), NodeSet>,
}

impl SepsetTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `z` for the unordered pair `{x, y}`, replacing any earlier entry.
    pub fn insert(&mut self, x: NodeId, y: NodeId, z: NodeSet) {
        debug_assert!(!z.contains(x) && !z.contains(y));
        self.entries.insert(ordered(x, y), z);
    }

    pub fn get(&self, x: NodeId, y: NodeId) -> Option<NodeSet> {
        self.entries.get(&ordered(x, y)).copied()
    }

    pub fn contains(&self, x: NodeId, y: NodeId) -> bool {
        self.entries.contains_key(&ordered(x, y))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in ascending pair order.
    pub fn iter(&self) -> impl Iterator<Item = ((NodeId, NodeId), NodeSet)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }
}
