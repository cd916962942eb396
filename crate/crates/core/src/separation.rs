//! Trail semantics on DAGs (d-separation) and on partially directed graphs
//! (p-trails).

use crate::error::{Error, Result};
use crate::extension::{enumerate_extensions, ExtensionLimits};
use crate::graph::{Dag, Graph, Pdag};
use crate::nodeset::{NodeId, NodeSet};
use crate::par::{self, Execution};

/// "Is `x` separated from `y` given `z`?"
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeparationQuery {
    pub x: NodeId,
    pub y: NodeId,
    pub z: NodeSet,
}

impl SeparationQuery {
    pub fn new(x: NodeId, y: NodeId, z: NodeSet) -> Result<Self> {
        let q = SeparationQuery { x, y, z };
        q.check_shape()?;
        Ok(q)
    }

    fn check_shape(&self) -> Result<()> {
        if self.x == self.y {
            return Err(Error::InvalidQuery(format!("x and y are both {}", self.x)));
        }
        if self.z.contains(self.x) || self.z.contains(self.y) {
            return Err(Error::InvalidQuery(
                "conditioning set contains an endpoint".into(),
            ));
        }
        Ok(())
    }

    /// Checks the query against the node range of `g`.
    pub fn validate<G: Graph>(&self, g: &G) -> Result<()> {
        self.check_shape()?;
        g.check_node(self.x)?;
        g.check_node(self.y)?;
        if !self.z.is_subset(g.nodes()) {
            return Err(Error::InvalidQuery(
                "conditioning set names nodes outside the graph".into(),
            ));
        }
        Ok(())
    }

    /// Parses `x _||_ y | z1,z2` (or with `⟂` as the separator) against the
    /// labels of `g`. The `| ...` part may be empty or missing.
    pub fn parse<G: Graph>(text: &str, g: &G) -> Result<Self> {
        let text = text.trim();
        let (x, rest) = ["⟂", "_||_"]
            .iter()
            .find_map(|sep| text.split_once(sep))
            .ok_or_else(|| Error::Parse(format!("query `{text}` lacks `_||_` or `⟂`")))?;
        let (y, z) = rest.split_once('|').unwrap_or((rest, ""));
        let x = g.node(x.trim())?;
        let y = g.node(y.trim())?;
        let mut zs = NodeSet::EMPTY;
        for label in z.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            zs.insert(g.node(label)?);
        }
        let q = SeparationQuery::new(x, y, zs)?;
        q.validate(g)?;
        Ok(q)
    }

    /// Renders the query in the ASCII text form accepted by [`SeparationQuery::parse`].
    pub fn display<G: Graph>(&self, g: &G) -> String {
        format!(
            "{} _||_ {} | {}",
            g.label(self.x),
            g.label(self.y),
            g.label_set(self.z).join(",")
        )
    }
}

#[derive(Clone, Copy)]
enum Arrival {
    /// Reached from a child, moving against the arrow.
    Up,
    /// Reached from a parent, moving along the arrow.
    Down,
}

/// Every node d-connected to `x` given `z` (excluding `x` itself).
///
/// Sweeps over (node, arrival direction) states; a collider is passable iff it
/// lies in the ancestral closure of `z`.
pub fn d_connected_nodes(g: &Dag, x: NodeId, z: NodeSet) -> NodeSet {
    let anc = g.ancestral_closure(z);
    let mut seen_up = NodeSet::EMPTY;
    let mut seen_down = NodeSet::EMPTY;
    let mut reach = NodeSet::EMPTY;
    let mut stack = vec![(x, Arrival::Up)];
    while let Some((v, dir)) = stack.pop() {
        let fresh = match dir {
            Arrival::Up => seen_up.insert(v),
            Arrival::Down => seen_down.insert(v),
        };
        if !fresh {
            continue;
        }
        let blocked = z.contains(v);
        if !blocked {
            reach.insert(v);
        }
        match dir {
            Arrival::Up if !blocked => {
                stack.extend(g.parents_of(v).iter().map(|p| (p, Arrival::Up)));
                stack.extend(g.children_of(v).iter().map(|c| (c, Arrival::Down)));
            }
            Arrival::Up => {}
            Arrival::Down => {
                if !blocked {
                    stack.extend(g.children_of(v).iter().map(|c| (c, Arrival::Down)));
                }
                if anc.contains(v) {
                    stack.extend(g.parents_of(v).iter().map(|p| (p, Arrival::Up)));
                }
            }
        }
    }
    reach.without(x)
}

/// True iff some trail between `q.x` and `q.y` is active given `q.z`.
pub fn active_trail_exists(g: &Dag, q: &SeparationQuery) -> Result<bool> {
    q.validate(g)?;
    Ok(d_connected_nodes(g, q.x, q.z).contains(q.y))
}

pub fn d_separated(g: &Dag, q: &SeparationQuery) -> Result<bool> {
    active_trail_exists(g, q).map(|c| !c)
}

/// Answers many d-separation queries against one graph.
pub fn d_separated_all(g: &Dag, queries: &[SeparationQuery], exec: Execution) -> Result<Vec<bool>> {
    par::try_map(exec, queries, |q| d_separated(g, q))
}

/// True iff some p-trail between `q.x` and `q.y` is active given `q.z`.
///
/// Each interior node of the trail must have a definite status:
/// * a definite collider (`a -> v <- b`) is active iff `v` or one of its
///   possible descendants (reachable along `->` or `-` edges) is in `z`;
/// * a definite non-collider (an arrow leaving `v` along the trail, or
///   `a - v - b` with `a`, `b` nonadjacent) is active iff `v` is outside `z`.
///
/// Any other interior node (`a -> v - b`, or `a - v - b` with `a` adjacent to
/// `b`) may be a collider in some extensions and not in others, and blocks
/// the trail. Searches simple trails depth-first, so the cost grows with the
/// number of trails.
pub fn active_ptrail_exists(g: &Pdag, q: &SeparationQuery) -> Result<bool> {
    q.validate(g)?;
    g.check_invariants()?;
    let open_collider: Vec<bool> = (0..g.node_count())
        .map(|v| {
            let v = NodeId(v);
            q.z.contains(v) || g.possible_descendants(v).intersects(q.z)
        })
        .collect();
    let search = PtrailSearch {
        g,
        q,
        open_collider,
    };
    Ok(search.from(q.x, None, NodeSet::singleton(q.x)))
}

struct PtrailSearch<'a> {
    g: &'a Pdag,
    q: &'a SeparationQuery,
    open_collider: Vec<bool>,
}

impl PtrailSearch<'_> {
    fn from(&self, cur: NodeId, prev: Option<NodeId>, on_path: NodeSet) -> bool {
        for next in self.g.adjacent_to(cur).difference(on_path) {
            if let Some(p) = prev {
                if !self.interior_active(p, cur, next) {
                    continue;
                }
            }
            if next == self.q.y {
                return true;
            }
            if self.from(next, Some(cur), on_path.with(next)) {
                return true;
            }
        }
        false
    }

    fn interior_active(&self, a: NodeId, v: NodeId, b: NodeId) -> bool {
        let g = self.g;
        if g.has_directed(a, v) && g.has_directed(b, v) {
            return self.open_collider[v.0];
        }
        let non_collider = g.has_directed(v, a)
            || g.has_directed(v, b)
            || (g.has_undirected(a, v) && g.has_undirected(v, b) && !g.is_adjacent(a, b));
        non_collider && !self.q.z.contains(v)
    }
}

/// True iff `q` is d-connected in every consistent extension of `g`.
pub fn connected_in_every_extension(
    g: &Pdag,
    q: &SeparationQuery,
    limits: &ExtensionLimits,
) -> Result<bool> {
    q.validate(g)?;
    let extensions = enumerate_extensions(g, limits)?;
    if extensions.is_empty() {
        return Err(Error::Inextensible(
            "no orientation of the undirected edges is consistent".into(),
        ));
    }
    for dag in &extensions {
        if !active_trail_exists(dag, q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn query<G: Graph>(g: &G, text: &str) -> SeparationQuery {
        SeparationQuery::parse(text, g).unwrap()
    }

    #[test]
    fn fig1_d_connection() {
        let g = fixtures::fig1_dag();
        assert!(!active_trail_exists(&g, &query(&g, "X1 _||_ X7 |")).unwrap());
        assert!(active_trail_exists(&g, &query(&g, "X1 _||_ X7 | X6")).unwrap());
        assert!(d_separated(&g, &query(&g, "X1 ⟂ X7")).unwrap());
        for z in ["", "X6", "X3,X4,X5", "X6,X7,X8,X9,X10"] {
            assert!(!d_separated(&g, &query(&g, &format!("X1 _||_ X2 | {z}"))).unwrap());
        }
    }

    #[test]
    fn adjacent_nodes_are_always_connected() {
        let g = fixtures::fig1_dag();
        for (a, b) in g.edges() {
            let rest = g.nodes().without(a).without(b);
            for z in [NodeSet::EMPTY, rest] {
                let q = SeparationQuery::new(a, b, z).unwrap();
                assert!(active_trail_exists(&g, &q).unwrap());
            }
        }
    }

    #[test]
    fn isolated_nodes_are_separated() {
        let g = Dag::new(["a", "b"]).unwrap();
        let q = SeparationQuery::new(NodeId(0), NodeId(1), NodeSet::EMPTY).unwrap();
        assert!(d_separated(&g, &q).unwrap());
    }

    #[test]
    fn invalid_queries_are_rejected() {
        let g = fixtures::fig1_dag();
        assert!(SeparationQuery::new(NodeId(0), NodeId(0), NodeSet::EMPTY).is_err());
        assert!(SeparationQuery::new(NodeId(0), NodeId(1), NodeSet::singleton(NodeId(1))).is_err());
        let q = SeparationQuery {
            x: NodeId(0),
            y: NodeId(11),
            z: NodeSet::EMPTY,
        };
        assert!(active_trail_exists(&g, &q).is_err());
        assert!(SeparationQuery::parse("X1 X2", &g).is_err());
        assert!(SeparationQuery::parse("X1 _||_ X99 |", &g).is_err());
        assert!(SeparationQuery::parse("X1 _||_ X2 | X1", &g).is_err());
    }

    #[test]
    fn query_text_round_trips() {
        let g = fixtures::fig1_dag();
        let q = query(&g, " X4 ⟂ X5 | X10 , X9 ");
        assert_eq!(q.display(&g), "X4 _||_ X5 | X9,X10");
        assert_eq!(query(&g, &q.display(&g)), q);
    }

    #[test]
    fn fig8_ptrails() {
        let g = fixtures::fig8_pdag();
        assert!(active_ptrail_exists(&g, &query(&g, "X11 _||_ X12 | X13")).unwrap());
        assert!(!active_ptrail_exists(&g, &query(&g, "X16 _||_ X17 | X15,X13")).unwrap());
        // X11 -> X14 - X15 <- X12: both interior nodes lack a definite status
        assert!(!active_ptrail_exists(&g, &query(&g, "X11 _||_ X12 |")).unwrap());
    }

    #[test]
    fn single_undirected_edge_is_an_active_ptrail() {
        let g = Pdag::from_labeled_edges(&["x", "y"], &[], &[("x", "y")]).unwrap();
        let q = SeparationQuery::new(NodeId(0), NodeId(1), NodeSet::EMPTY).unwrap();
        assert!(active_ptrail_exists(&g, &q).unwrap());
    }

    #[test]
    fn every_extension_on_fig8() {
        let g = fixtures::fig8_pdag();
        let lim = ExtensionLimits::default();
        assert!(connected_in_every_extension(&g, &query(&g, "X11 _||_ X12 | X13"), &lim).unwrap());
        // X11 and X12 are parentless and share no ancestor in every extension
        assert!(!connected_in_every_extension(&g, &query(&g, "X11 _||_ X12 |"), &lim).unwrap());
    }

    #[test]
    fn every_extension_of_a_dag_is_the_dag() {
        let g = fixtures::fig1_dag();
        let lim = ExtensionLimits::default();
        for text in [
            "X1 _||_ X7 |",
            "X1 _||_ X7 | X6",
            "X4 _||_ X5 | X10",
            "X3 _||_ X8 | X5",
        ] {
            let q = query(&g, text);
            assert_eq!(
                connected_in_every_extension(g.as_pdag(), &q, &lim).unwrap(),
                active_trail_exists(&g, &q).unwrap()
            );
        }
    }

    #[test]
    fn inextensible_graph_is_an_error() {
        // a -> b - c <- d: either orientation of b - c adds a new collider
        let g = Pdag::from_labeled_edges(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("d", "c")],
            &[("b", "c")],
        )
        .unwrap();
        let q = SeparationQuery::new(NodeId(0), NodeId(3), NodeSet::EMPTY).unwrap();
        let r = connected_in_every_extension(&g, &q, &ExtensionLimits::default());
        assert!(matches!(r, Err(Error::Inextensible(_))), "{r:?}");
    }

    #[test]
    fn batch_matches_single_queries() {
        let g = fixtures::fig1_dag();
        let qs: Vec<SeparationQuery> = ["X1 _||_ X7 |", "X1 _||_ X7 | X6", "X4 _||_ X5 |"]
            .iter()
            .map(|t| query(&g, t))
            .collect();
        let seq = d_separated_all(&g, &qs, Execution::Sequential).unwrap();
        let par = d_separated_all(&g, &qs, Execution::Parallel).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq, vec![true, false, false]);
    }
}
