//! Brute-force reference implementations, deliberately written without the
//! library's traversal code: plain edge lists, explicit path enumeration and
//! exhaustive orientation.

#![allow(dead_code)]

use std::collections::BTreeSet;

use dagrecover::{Dag, Graph, NodeId, NodeSet, Pdag};

/// Adjacency rebuilt from the edge list only.
pub struct EdgeList {
    pub n: usize,
    pub directed: BTreeSet<(usize, usize)>,
    pub undirected: BTreeSet<(usize, usize)>,
}

impl EdgeList {
    pub fn of_pdag(g: &Pdag) -> Self {
        EdgeList {
            n: g.node_count(),
            directed: g
                .directed_edges()
                .iter()
                .map(|&(a, b)| (a.0, b.0))
                .collect(),
            undirected: g
                .undirected_edges()
                .iter()
                .map(|&(a, b)| (a.0, b.0))
                .collect(),
        }
    }

    pub fn of_dag(g: &Dag) -> Self {
        Self::of_pdag(g.as_pdag())
    }

    pub fn arrow(&self, a: usize, b: usize) -> bool {
        self.directed.contains(&(a, b))
    }

    pub fn line(&self, a: usize, b: usize) -> bool {
        self.undirected.contains(&(a.min(b), a.max(b)))
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.arrow(a, b) || self.arrow(b, a) || self.line(a, b)
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&u| u != v && self.adjacent(u, v))
            .collect()
    }

    /// Descendants by recursive DFS over arrows only.
    pub fn descendants(&self, v: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &(t, h) in &self.directed {
                if t == u && out.insert(h) {
                    stack.push(h);
                }
            }
        }
        out.remove(&v);
        out
    }

    pub fn is_acyclic(&self) -> bool {
        let mut indeg = vec![0usize; self.n];
        for &(_, h) in &self.directed {
            indeg[h] += 1;
        }
        let mut ready: Vec<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = ready.pop() {
            seen += 1;
            for &(t, h) in &self.directed {
                if t == v {
                    indeg[h] -= 1;
                    if indeg[h] == 0 {
                        ready.push(h);
                    }
                }
            }
        }
        seen == self.n
    }

    /// `(a, w, b)` with `a < b`, both arrows present, `a`, `b` nonadjacent.
    pub fn unshielded_colliders(&self) -> BTreeSet<(usize, usize, usize)> {
        let mut out = BTreeSet::new();
        for w in 0..self.n {
            for a in 0..self.n {
                for b in a + 1..self.n {
                    if self.arrow(a, w) && self.arrow(b, w) && !self.adjacent(a, b) {
                        out.insert((a, w, b));
                    }
                }
            }
        }
        out
    }
}

/// Every simple path from `x` to `y` in the skeleton.
pub fn simple_paths(e: &EdgeList, x: usize, y: usize) -> Vec<Vec<usize>> {
    fn go(e: &EdgeList, path: &mut Vec<usize>, y: usize, out: &mut Vec<Vec<usize>>) {
        let cur = *path.last().unwrap();
        if cur == y {
            out.push(path.clone());
            return;
        }
        for u in e.neighbours(cur) {
            if !path.contains(&u) {
                path.push(u);
                go(e, path, y, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(e, &mut vec![x], y, &mut out);
    out
}

/// d-connection by enumerating every simple trail and checking each interior
/// triple.
pub fn brute_d_connected(g: &Dag, x: usize, y: usize, z: &BTreeSet<usize>) -> bool {
    let e = EdgeList::of_dag(g);
    simple_paths(&e, x, y).iter().any(|p| {
        p.windows(3).all(|w| {
            let (a, v, b) = (w[0], w[1], w[2]);
            if e.arrow(a, v) && e.arrow(b, v) {
                z.contains(&v) || e.descendants(v).iter().any(|d| z.contains(d))
            } else {
                !z.contains(&v)
            }
        })
    })
}

/// Every orientation of the undirected edges, kept if acyclic and every
/// unshielded collider was already a collider of arrows in `g`.
pub fn brute_extensions(g: &Pdag) -> Vec<BTreeSet<(usize, usize)>> {
    let base = EdgeList::of_pdag(g);
    let base_colliders = base.unshielded_colliders();
    let und: Vec<(usize, usize)> = base.undirected.iter().copied().collect();
    assert!(und.len() <= 20, "too many undirected edges for brute force");
    let mut out = Vec::new();
    for mask in 0u32..(1 << und.len()) {
        let mut directed = base.directed.clone();
        for (i, &(a, b)) in und.iter().enumerate() {
            if mask & (1 << i) != 0 {
                directed.insert((a, b));
            } else {
                directed.insert((b, a));
            }
        }
        let cand = EdgeList {
            n: base.n,
            directed,
            undirected: BTreeSet::new(),
        };
        if cand.is_acyclic() && cand.unshielded_colliders().is_subset(&base_colliders) {
            out.push(cand.directed);
        }
    }
    out.sort();
    out
}

pub fn edge_set(d: &Dag) -> BTreeSet<(usize, usize)> {
    d.edges().iter().map(|&(a, b)| (a.0, b.0)).collect()
}

/// All subsets of `items`.
pub fn powerset(items: &[usize]) -> Vec<BTreeSet<usize>> {
    (0u32..(1 << items.len()))
        .map(|m| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| m & (1 << i) != 0)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

pub fn to_nodeset(s: &BTreeSet<usize>) -> NodeSet {
    s.iter().map(|&v| NodeId(v)).collect()
}

/// Skeleton under exhaustive search: `x - y` survives iff no subset of the
/// other nodes d-separates them.
pub fn brute_skeleton(g: &Dag) -> BTreeSet<(usize, usize)> {
    let n = g.node_count();
    let mut out = BTreeSet::new();
    for x in 0..n {
        for y in x + 1..n {
            let rest: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
            if powerset(&rest)
                .iter()
                .all(|z| brute_d_connected(g, x, y, z))
            {
                out.insert((x, y));
            }
        }
    }
    out
}

/// All queries `(x, y, z)` with `x < y` and `|z| <= max_z`.
pub fn all_queries(n: usize, max_z: usize) -> Vec<(usize, usize, BTreeSet<usize>)> {
    let mut out = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            let rest: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
            for z in powerset(&rest) {
                if z.len() <= max_z {
                    out.push((x, y, z.clone()));
                }
            }
        }
    }
    out
}
