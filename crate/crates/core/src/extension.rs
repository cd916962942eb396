//! Consistent extensions of partially directed graphs.
//!
//! A node is *removable* when it has no outgoing arrow and each of its
//! undirected neighbours is adjacent to every other node adjacent to it.
//! Removing such a node commits every undirected edge at it to point into it.
//! Repeating this until the graph is empty yields a derived DAG with the same
//! skeleton, the same arrows and no new unshielded collider.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Dag, Graph, Pdag};
use crate::nodeset::{NodeId, NodeSet};

/// Orientations committed when a node was removed. Labels rather than
/// indices, since indices shift as nodes are removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RemovalRecord {
    pub removed: String,
    /// `(tail, head)` pairs; `head` is always `removed`.
    pub enforced: Vec<(String, String)>,
}

/// Why `v` cannot be removed from the live part of `g`, if it cannot.
fn removal_blocker(g: &Pdag, alive: NodeSet, v: NodeId) -> Option<String> {
    if let Some(c) = g.children_of(v).intersection(alive).first() {
        return Some(format!("it has an outgoing edge to `{}`", g.label(c)));
    }
    let adj = g.adjacent_to(v).intersection(alive);
    for u in g.neighbors_of(v).intersection(alive) {
        let missing = adj.without(u).difference(g.adjacent_to(u));
        if let Some(m) = missing.first() {
            return Some(format!(
                "undirected neighbour `{}` is not adjacent to `{}`",
                g.label(u),
                g.label(m)
            ));
        }
    }
    None
}

fn removable_in(g: &Pdag, alive: NodeSet) -> NodeSet {
    alive
        .iter()
        .filter(|&v| removal_blocker(g, alive, v).is_none())
        .collect()
}

/// All nodes that may legitimately be removed next.
pub fn removable_nodes(g: &Pdag) -> NodeSet {
    removable_in(g, g.nodes())
}

/// Removes `v`, first committing every undirected edge `u - v` as `u -> v`.
///
/// The returned graph has `v` deleted and all other edges untouched; node
/// indices above `v` shift down by one.
pub fn remove_node(g: &Pdag, v: NodeId) -> Result<(Pdag, RemovalRecord)> {
    g.check_node(v)?;
    if let Some(reason) = removal_blocker(g, g.nodes(), v) {
        return Err(Error::NotRemovable {
            node: g.label(v).to_string(),
            reason,
        });
    }
    let record = RemovalRecord {
        removed: g.label(v).to_string(),
        enforced: g
            .neighbors_of(v)
            .iter()
            .map(|u| (g.label(u).to_string(), g.label(v).to_string()))
            .collect(),
    };
    Ok((g.without_node(v), record))
}

/// Removes nodes until none remain, always taking the lowest-index removable
/// node, and returns the derived DAG with the removal log.
pub fn removal_sequence(g: &Pdag) -> Result<(Dag, Vec<RemovalRecord>)> {
    g.check_invariants()?;
    let mut dag = Pdag::new(g.labels().iter().cloned())?;
    for (t, h) in g.directed_edges() {
        dag.add_directed(t, h)?;
    }
    let mut alive = g.nodes();
    let mut records = Vec::with_capacity(g.node_count());
    while !alive.is_empty() {
        let Some(v) = removable_in(g, alive).first() else {
            let stuck = g.label_set(alive).join(", ");
            return Err(Error::Inextensible(format!(
                "no removable node among {{{stuck}}}"
            )));
        };
        let mut enforced = Vec::new();
        for u in g.neighbors_of(v).intersection(alive) {
            dag.add_directed(u, v)
                .map_err(|e| Error::Inextensible(e.to_string()))?;
            enforced.push((g.label(u).to_string(), g.label(v).to_string()));
        }
        records.push(RemovalRecord {
            removed: g.label(v).to_string(),
            enforced,
        });
        alive.remove(v);
    }
    Ok((Dag::try_from(dag)?, records))
}

/// One consistent extension of `g`, built by repeated removal.
pub fn derive_dag(g: &Pdag) -> Result<Dag> {
    removal_sequence(g).map(|(dag, _)| dag)
}

/// Bounds on [`enumerate_extensions`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtensionLimits {
    /// Refuse graphs with more undirected edges than this.
    pub max_undirected: usize,
    /// Refuse to return more extensions than this.
    pub cap: usize,
}

impl Default for ExtensionLimits {
    fn default() -> Self {
        ExtensionLimits {
            max_undirected: 12,
            cap: 100_000,
        }
    }
}

impl ExtensionLimits {
    pub fn with_max_undirected(mut self, n: usize) -> Self {
        self.max_undirected = n;
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }
}

struct Orienter<'a> {
    g: &'a Pdag,
    undirected: Vec<(NodeId, NodeId)>,
    parents: Vec<NodeSet>,
    children: Vec<NodeSet>,
    chosen: Vec<(NodeId, NodeId)>,
    out: Vec<Dag>,
    cap: usize,
}

impl Orienter<'_> {
    fn reaches(&self, from: NodeId, to: NodeId) -> bool {
        let mut seen = NodeSet::singleton(from);
        let mut frontier = NodeSet::singleton(from);
        while !frontier.is_empty() {
            let mut next = NodeSet::EMPTY;
            for v in frontier {
                next = next.union(self.children[v.0]);
            }
            if next.contains(to) {
                return true;
            }
            frontier = next.difference(seen);
            seen = seen.union(next);
        }
        false
    }

    /// `tail -> head` is new, so any parent of `head` nonadjacent to `tail`
    /// would form an unshielded collider absent from the input.
    fn legal(&self, tail: NodeId, head: NodeId) -> bool {
        let adj = self.g.adjacent_to(tail);
        self.parents[head.0]
            .difference(adj)
            .without(tail)
            .is_empty()
            && !self.reaches(head, tail)
    }

    fn run(&mut self, i: usize) -> Result<()> {
        if i == self.undirected.len() {
            if self.out.len() == self.cap {
                return Err(Error::EnumerationBound(format!(
                    "more than {} consistent extensions",
                    self.cap
                )));
            }
            let mut dag = Pdag::new(self.g.labels().iter().cloned())?;
            for (t, h) in self
                .g
                .directed_edges()
                .into_iter()
                .chain(self.chosen.iter().copied())
            {
                dag.add_directed(t, h)?;
            }
            self.out.push(Dag::try_from(dag)?);
            return Ok(());
        }
        let (a, b) = self.undirected[i];
        for (t, h) in [(a, b), (b, a)] {
            if self.legal(t, h) {
                self.children[t.0].insert(h);
                self.parents[h.0].insert(t);
                self.chosen.push((t, h));
                let r = self.run(i + 1);
                self.chosen.pop();
                self.children[t.0].remove(h);
                self.parents[h.0].remove(t);
                r?;
            }
        }
        Ok(())
    }
}

/// Every orientation of `g`'s undirected edges that stays acyclic and adds no
/// unshielded collider, sorted by edge list.
pub fn enumerate_extensions(g: &Pdag, limits: &ExtensionLimits) -> Result<Vec<Dag>> {
    g.check_invariants()?;
    let undirected = g.undirected_edges();
    if undirected.len() > limits.max_undirected {
        return Err(Error::EnumerationBound(format!(
            "{} undirected edges exceed the bound of {}",
            undirected.len(),
            limits.max_undirected
        )));
    }
    let n = g.node_count();
    let mut o = Orienter {
        g,
        undirected,
        parents: (0..n).map(|v| g.parents_of(NodeId(v))).collect(),
        children: (0..n).map(|v| g.children_of(NodeId(v))).collect(),
        chosen: Vec::new(),
        out: Vec::new(),
        cap: limits.cap,
    };
    o.run(0)?;
    let mut out = o.out;
    out.sort_by_cached_key(|d| d.edges());
    out.dedup();
    Ok(out)
}

/// Same skeleton and same unshielded colliders.
pub fn markov_equivalent(a: &Dag, b: &Dag) -> Result<bool> {
    if a.labels() != b.labels() {
        return Err(Error::NodeSetMismatch(format!(
            "[{}] vs [{}]",
            a.labels().join(", "),
            b.labels().join(", ")
        )));
    }
    Ok(a.skeleton() == b.skeleton() && a.unshielded_colliders() == b.unshielded_colliders())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ids<G: Graph>(g: &G, labels: &[&str]) -> NodeSet {
        labels.iter().map(|l| g.node(l).unwrap()).collect()
    }

    fn id<G: Graph>(g: &G, l: &str) -> NodeId {
        g.node(l).unwrap()
    }

    #[test]
    fn removable_on_fig6_and_fig7() {
        let g6 = fixtures::fig6_pdag();
        assert_eq!(removable_nodes(&g6), ids(&g6, &["X1", "X3", "X8", "X9"]));
        let g7 = fixtures::fig7_pdag();
        assert_eq!(removable_nodes(&g7), ids(&g7, &["X1", "X4", "X6"]));
    }

    #[test]
    fn single_node_is_removable() {
        let g = Pdag::new(["a"]).unwrap();
        assert_eq!(removable_nodes(&g), NodeSet::singleton(NodeId(0)));
    }

    #[test]
    fn fig6_to_fig7_by_removal() {
        let mut g = fixtures::fig6_pdag();
        let mut records = Vec::new();
        for label in ["X3", "X8", "X9"] {
            let (h, r) = remove_node(&g, id(&g, label)).unwrap();
            records.push(r);
            g = h;
        }
        assert_eq!(g, fixtures::fig7_pdag());
        assert_eq!(
            records[0].enforced,
            vec![("X4".to_string(), "X3".to_string())]
        );
        assert!(records[1].enforced.is_empty());
        assert!(records[2].enforced.is_empty());
    }

    #[test]
    fn remove_single_edge() {
        let g = Pdag::from_labeled_edges(&["a", "b"], &[], &[("a", "b")]).unwrap();
        let (h, r) = remove_node(&g, NodeId(1)).unwrap();
        assert_eq!(r.enforced, vec![("a".to_string(), "b".to_string())]);
        assert_eq!(h.labels(), ["a".to_string()]);
        assert_eq!(h.edge_count(), 0);
    }

    #[test]
    fn non_removable_nodes_are_rejected() {
        let g = fixtures::fig6_pdag();
        match remove_node(&g, id(&g, "X10")) {
            Err(Error::NotRemovable { node, reason }) => {
                assert_eq!(node, "X10");
                assert!(reason.contains("outgoing"), "{reason}");
            }
            other => panic!("{other:?}"),
        }
        let g7 = fixtures::fig7_pdag();
        match remove_node(&g7, id(&g7, "X10")) {
            Err(Error::NotRemovable { reason, .. }) => {
                assert!(reason.contains("not adjacent"), "{reason}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn removing_everything_yields_a_dag() {
        let g = fixtures::fig6_pdag();
        let mut cur = g.clone();
        let mut enforced = Vec::new();
        while cur.node_count() > 0 {
            // highest-index removable node, to differ from derive_dag's choice
            let v = removable_nodes(&cur).iter().last().unwrap();
            let (next, r) = remove_node(&cur, v).unwrap();
            enforced.extend(r.enforced);
            cur = next;
        }
        let mut dag = Pdag::new(g.labels().iter().cloned()).unwrap();
        for (t, h) in g.directed_edges() {
            dag.add_directed(t, h).unwrap();
        }
        for (t, h) in &enforced {
            dag.add_directed(id(&g, t), id(&g, h)).unwrap();
        }
        let dag = Dag::try_from(dag).unwrap();
        assert_eq!(dag.edge_count(), 14);
        let exts = enumerate_extensions(&g, &ExtensionLimits::default()).unwrap();
        assert!(exts.contains(&dag));
    }

    #[test]
    fn derive_dag_on_fig6() {
        let g = fixtures::fig6_pdag();
        let d = derive_dag(&g).unwrap();
        assert!(markov_equivalent(&d, &fixtures::fig1_dag()).unwrap());
        for (t, h) in g.directed_edges() {
            assert!(d.has_edge(t, h));
        }
    }

    #[test]
    fn derive_dag_of_dag_is_itself() {
        let g = fixtures::fig1_dag();
        assert_eq!(derive_dag(g.as_pdag()).unwrap(), g);
    }

    #[test]
    fn derive_dag_on_undirected_triangle() {
        let g =
            Pdag::from_labeled_edges(&["a", "b", "c"], &[], &[("a", "b"), ("b", "c"), ("a", "c")])
                .unwrap();
        let d = derive_dag(&g).unwrap();
        assert_eq!(d.skeleton(), g.skeleton());
        assert_eq!(d.edge_count(), 3);
        let exts = enumerate_extensions(&g, &ExtensionLimits::default()).unwrap();
        assert_eq!(exts.len(), 6);
        assert!(exts.contains(&d));
    }

    #[test]
    fn derive_dag_reports_inextensible() {
        let g = Pdag::from_labeled_edges(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("d", "c")],
            &[("b", "c")],
        )
        .unwrap();
        assert!(matches!(derive_dag(&g), Err(Error::Inextensible(_))));
    }

    #[test]
    fn fig8_has_three_extensions() {
        let g = fixtures::fig8_pdag();
        let exts = enumerate_extensions(&g, &ExtensionLimits::default()).unwrap();
        assert_eq!(exts.len(), 3);
        let (x13, x14, x15) = (id(&g, "X13"), id(&g, "X14"), id(&g, "X15"));
        let choices: Vec<(bool, bool)> = exts
            .iter()
            .map(|d| (d.has_edge(x14, x15), d.has_edge(x14, x13)))
            .collect();
        for want in [(true, true), (false, true), (true, false)] {
            assert!(choices.contains(&want), "{choices:?}");
        }
        // X15 -> X14 <- X13 would be a new unshielded collider
        assert!(!exts
            .iter()
            .any(|d| d.has_edge(x15, x14) && d.has_edge(x13, x14)));
    }

    #[test]
    fn trivial_enumerations() {
        let g = fixtures::fig1_dag();
        assert_eq!(
            enumerate_extensions(g.as_pdag(), &ExtensionLimits::default()).unwrap(),
            vec![g]
        );
        let e = Pdag::from_labeled_edges(&["a", "b"], &[], &[("a", "b")]).unwrap();
        assert_eq!(
            enumerate_extensions(&e, &ExtensionLimits::default())
                .unwrap()
                .len(),
            2
        );
    }

    #[test]
    fn enumeration_limits() {
        let g = fixtures::fig2_skeleton().to_pdag();
        let tight = ExtensionLimits::default().with_max_undirected(13);
        assert!(matches!(
            enumerate_extensions(&g, &tight),
            Err(Error::EnumerationBound(_))
        ));
        let tri =
            Pdag::from_labeled_edges(&["a", "b", "c"], &[], &[("a", "b"), ("b", "c"), ("a", "c")])
                .unwrap();
        assert!(matches!(
            enumerate_extensions(&tri, &ExtensionLimits::default().with_cap(5)),
            Err(Error::EnumerationBound(_))
        ));
        assert_eq!(
            enumerate_extensions(&tri, &ExtensionLimits::default().with_cap(6))
                .unwrap()
                .len(),
            6
        );
    }

    #[test]
    fn markov_equivalence_basics() {
        let g = fixtures::fig1_dag();
        assert!(markov_equivalent(&g, &g).unwrap());
        let ab = Dag::from_labeled_edges(&["a", "b"], &[("a", "b")]).unwrap();
        let ba = Dag::from_labeled_edges(&["a", "b"], &[("b", "a")]).unwrap();
        assert!(markov_equivalent(&ab, &ba).unwrap());
        let chain = Dag::from_labeled_edges(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let collider =
            Dag::from_labeled_edges(&["a", "b", "c"], &[("a", "b"), ("c", "b")]).unwrap();
        assert!(!markov_equivalent(&chain, &collider).unwrap());
        assert!(matches!(
            markov_equivalent(&ab, &chain),
            Err(Error::NodeSetMismatch(_))
        ));
    }

    #[test]
    fn fig6_extensions_are_equivalent_to_fig1() {
        let truth = fixtures::fig1_dag();
        let exts =
            enumerate_extensions(&fixtures::fig6_pdag(), &ExtensionLimits::default()).unwrap();
        assert!(!exts.is_empty());
        for d in &exts {
            assert!(markov_equivalent(&truth, d).unwrap());
        }
        assert!(exts.contains(&truth));
    }
}
