//! The recovery pipeline: skeleton search, collider orientation, and closure
//! under the propagation rules.
//!
//! Rule IIc orients `b -> c` from `a -> b - c` when `a` and `c` are
//! nonadjacent. Rule IV orients `a -> b` when a directed path already leads
//! from `a` to `b`. Rule V orients `l -> j` when `l - i -> j`, `l - k -> j`
//! and `l - j` with `i`, `k` nonadjacent.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{ColliderConflict, Error, Result};
use crate::graph::{Graph, Pdag, SepsetTable, UGraph};
use crate::nodeset::{NodeId, NodeSet};
use crate::oracle::{CountingOracle, IndependenceOracle, OracleStats};
use crate::par::{self, Execution};

/// Oracles with more variables than this need an explicit `max_cond`.
pub const UNBOUNDED_SEARCH_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    II,
    IIc,
    IV,
    V,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::II => "II",
            Rule::IIc => "IIc",
            Rule::IV => "IV",
            Rule::V => "V",
        })
    }
}

/// The propagation rules in their default application order.
pub const PROPAGATION_RULES: [Rule; 3] = [Rule::IIc, Rule::IV, Rule::V];

/// One orientation and the rule that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEntry {
    pub rule: Rule,
    pub tail: NodeId,
    pub head: NodeId,
}

impl TraceEntry {
    /// `RULE <tag>: <tail> -> <head>`
    pub fn render<G: Graph>(&self, g: &G) -> String {
        format!(
            "RULE {}: {} -> {}",
            self.rule,
            g.label(self.tail),
            g.label(self.head)
        )
    }
}

/// What to do when collider orientation contradicts itself.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ConflictPolicy {
    /// Fail. Appropriate for a perfect oracle, where a conflict means a bug.
    #[default]
    Error,
    /// Leave the contested edges undirected and record a warning.
    Warn,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryOptions {
    /// Largest conditioning set tried. `None` means unbounded, which is only
    /// accepted for up to [`UNBOUNDED_SEARCH_LIMIT`] variables.
    pub max_cond: Option<usize>,
    pub conflicts: ConflictPolicy,
    pub execution: Execution,
    pub rule_order: Vec<Rule>,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        RecoveryOptions {
            max_cond: None,
            conflicts: ConflictPolicy::Error,
            execution: Execution::default(),
            rule_order: PROPAGATION_RULES.to_vec(),
        }
    }
}

impl RecoveryOptions {
    fn cond_bound(&self, n: usize) -> Result<usize> {
        match self.max_cond {
            Some(k) => Ok(k),
            None if n <= UNBOUNDED_SEARCH_LIMIT => Ok(n.saturating_sub(2)),
            None => Err(Error::MaxCondRequired(n)),
        }
    }
}

/// First subset of size `level` drawn from `ax`, then from `ay`, that
/// separates `x` and `y`.
fn find_witness<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    x: NodeId,
    y: NodeId,
    ax: NodeSet,
    ay: NodeSet,
    level: usize,
) -> Result<Option<NodeSet>> {
    for z in ax.subsets_of_size(level) {
        if oracle.is_independent(x, y, z)? {
            return Ok(Some(z));
        }
    }
    for z in ay.subsets_of_size(level) {
        if z.is_subset(ax) {
            continue;
        }
        if oracle.is_independent(x, y, z)? {
            return Ok(Some(z));
        }
    }
    Ok(None)
}

/// Starts from the complete graph and deletes `x - y` once some conditioning
/// set separates them, trying sets of increasing size drawn from the current
/// neighbours of `x` and of `y`.
///
/// Within one size level the adjacency sets are frozen, so pairs are tested
/// independently (in parallel under [`Execution::Parallel`]) and the result
/// does not depend on scheduling.
pub fn find_skeleton<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    opts: &RecoveryOptions,
) -> Result<(UGraph, SepsetTable)> {
    let n = oracle.variable_count();
    if n == 0 {
        return Err(Error::InvalidArgument("oracle has no variables".into()));
    }
    let bound = opts.cond_bound(n)?;
    let mut g = UGraph::complete(oracle.labels().iter().cloned())?;
    let mut sepsets = SepsetTable::new();
    for level in 0..=bound {
        let adj: Vec<NodeSet> = (0..n).map(|v| g.adjacent_to(NodeId(v))).collect();
        let pairs: Vec<(NodeId, NodeId)> = g
            .edges()
            .into_iter()
            .filter(|&(x, y)| {
                adj[x.0].without(y).len() >= level || adj[y.0].without(x).len() >= level
            })
            .collect();
        if pairs.is_empty() {
            break;
        }
        let found = par::try_map(opts.execution, &pairs, |&(x, y)| {
            find_witness(
                oracle,
                x,
                y,
                adj[x.0].without(y),
                adj[y.0].without(x),
                level,
            )
        })?;
        for (&(x, y), z) in pairs.iter().zip(found) {
            if let Some(z) = z {
                g.remove_edge(x, y);
                sepsets.insert(x, y, z);
            }
        }
    }
    Ok((g, sepsets))
}

type Triple = (NodeId, NodeId, NodeId);

/// Result of [`orient_colliders`].
#[derive(Debug, Clone)]
pub struct ColliderOrientation {
    pub pdag: Pdag,
    /// Arrows added, sorted.
    pub arrows: Vec<(NodeId, NodeId)>,
    /// Non-fatal problems under [`ConflictPolicy::Warn`].
    pub warnings: Vec<String>,
}

/// Orients `x -> w <- y` for every unshielded triple `x - w - y` whose
/// recorded separating set for `{x, y}` excludes `w`.
pub fn orient_colliders(
    skeleton: &UGraph,
    sepsets: &SepsetTable,
    policy: ConflictPolicy,
) -> Result<ColliderOrientation> {
    let n = skeleton.node_count();
    // arrow -> triples proposing it
    let mut proposals: BTreeMap<(NodeId, NodeId), Vec<Triple>> = BTreeMap::new();
    for a in 0..n {
        let a = NodeId(a);
        for b in skeleton.nodes().difference(skeleton.adjacent_to(a)) {
            if b <= a {
                continue;
            }
            let sep = sepsets.get(a, b).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "no separating set recorded for nonadjacent `{}`, `{}`",
                    skeleton.label(a),
                    skeleton.label(b)
                ))
            })?;
            let common = skeleton
                .adjacent_to(a)
                .intersection(skeleton.adjacent_to(b));
            for w in common.difference(sep) {
                proposals.entry((a, w)).or_default().push((a, w, b));
                proposals.entry((b, w)).or_default().push((a, w, b));
            }
        }
    }
    for (a, b) in skeleton.edges() {
        if sepsets.contains(a, b) {
            return Err(Error::InvalidArgument(format!(
                "separating set recorded for adjacent `{}`, `{}`",
                skeleton.label(a),
                skeleton.label(b)
            )));
        }
    }

    let label = |v: NodeId| skeleton.label(v).to_string();
    let mut conflicts = Vec::new();
    for (&(t, h), triples) in &proposals {
        if t < h {
            if let Some(rev) = proposals.get(&(h, t)) {
                conflicts.push(ColliderConflict {
                    edge: (label(t), label(h)),
                    triples: triples
                        .iter()
                        .chain(rev)
                        .map(|&(a, w, b)| (label(a), label(w), label(b)))
                        .collect(),
                });
            }
        }
    }
    let mut warnings = Vec::new();
    if !conflicts.is_empty() {
        match policy {
            ConflictPolicy::Error => return Err(Error::ColliderConflict(conflicts)),
            ConflictPolicy::Warn => {
                let e = Error::ColliderConflict(conflicts);
                warnings.push(format!("{e}; contested edges left undirected"));
            }
        }
    }

    let mut pdag = skeleton.to_pdag();
    let mut arrows = Vec::new();
    for &(t, h) in proposals.keys() {
        if proposals.contains_key(&(h, t)) {
            continue;
        }
        match pdag.orient(t, h) {
            Ok(()) => arrows.push((t, h)),
            Err(e @ Error::Cycle { .. }) if policy == ConflictPolicy::Warn => {
                warnings.push(format!("{e}; edge left undirected"))
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ColliderOrientation {
        pdag,
        arrows,
        warnings,
    })
}

/// `b -> c` for every `a -> b - c` with `a`, `c` nonadjacent.
pub fn rule_iic(g: &Pdag) -> BTreeSet<(NodeId, NodeId)> {
    let mut out = BTreeSet::new();
    for b in g.nodes() {
        let pa = g.parents_of(b);
        if pa.is_empty() {
            continue;
        }
        for c in g.neighbors_of(b) {
            if !pa.difference(g.adjacent_to(c)).is_empty() {
                out.insert((b, c));
            }
        }
    }
    out
}

/// `a -> b` for every `a - b` where a directed path leads from `a` to `b`.
pub fn rule_iv(g: &Pdag) -> BTreeSet<(NodeId, NodeId)> {
    let mut out = BTreeSet::new();
    for (a, b) in g.undirected_edges() {
        if g.directed_reaches(a, b) {
            out.insert((a, b));
        } else if g.directed_reaches(b, a) {
            out.insert((b, a));
        }
    }
    out
}

/// `l -> j` for every `l - j` with two nonadjacent `i`, `k` such that
/// `l - i -> j` and `l - k -> j`.
pub fn rule_v(g: &Pdag) -> BTreeSet<(NodeId, NodeId)> {
    let mut out = BTreeSet::new();
    for l in g.nodes() {
        let nb = g.neighbors_of(l);
        for j in nb {
            let flank = nb.intersection(g.parents_of(j));
            let fires = flank
                .iter()
                .any(|i| !flank.difference(g.adjacent_to(i)).without(i).is_empty());
            if fires {
                out.insert((l, j));
            }
        }
    }
    out
}

fn rule_matches(rule: Rule, g: &Pdag) -> Result<BTreeSet<(NodeId, NodeId)>> {
    match rule {
        Rule::IIc => Ok(rule_iic(g)),
        Rule::IV => Ok(rule_iv(g)),
        Rule::V => Ok(rule_v(g)),
        Rule::II => Err(Error::InvalidArgument(
            "rule II is not a propagation rule".into(),
        )),
    }
}

/// One application of one rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pass {
    pub rule: Rule,
    pub oriented: Vec<(NodeId, NodeId)>,
}

#[derive(Debug, Clone)]
pub struct Closure {
    pub pdag: Pdag,
    pub trace: Vec<TraceEntry>,
    /// Every pass in application order, including passes that found nothing.
    pub passes: Vec<Pass>,
}

/// Sweeps the rules in `order` until a full sweep orients nothing.
///
/// Each pass matches its rule against the graph as it stood at the start of
/// the pass, then applies the matches in sorted order.
pub fn close_orientations(g: &Pdag, order: &[Rule]) -> Result<Closure> {
    if order.is_empty() {
        return Err(Error::InvalidArgument("empty rule order".into()));
    }
    let mut g = g.clone();
    let mut trace = Vec::new();
    let mut passes = Vec::new();
    loop {
        let mut changed = false;
        for &rule in order {
            let mut oriented = Vec::new();
            for (t, h) in rule_matches(rule, &g)? {
                // an earlier match this pass may have oriented the reverse
                if g.has_undirected(t, h) {
                    g.orient(t, h)?;
                    oriented.push((t, h));
                    trace.push(TraceEntry {
                        rule,
                        tail: t,
                        head: h,
                    });
                }
            }
            changed |= !oriented.is_empty();
            passes.push(Pass { rule, oriented });
        }
        if !changed {
            break;
        }
    }
    Ok(Closure {
        pdag: g,
        trace,
        passes,
    })
}

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub pdag: Pdag,
    pub skeleton: UGraph,
    pub sepsets: SepsetTable,
    pub stats: OracleStats,
    pub trace: Vec<TraceEntry>,
    /// Propagation passes (collider orientation excluded).
    pub passes: Vec<Pass>,
    pub warnings: Vec<String>,
}

impl RecoveryResult {
    pub fn trace_lines(&self) -> Vec<String> {
        self.trace.iter().map(|t| t.render(&self.pdag)).collect()
    }
}

/// Skeleton, then colliders, then closure.
pub fn recover<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult> {
    let counter = CountingOracle::new(oracle);
    let (skeleton, sepsets) = find_skeleton(&counter, opts)?;
    let colliders = orient_colliders(&skeleton, &sepsets, opts.conflicts)?;
    let mut trace: Vec<TraceEntry> = colliders
        .arrows
        .iter()
        .map(|&(tail, head)| TraceEntry {
            rule: Rule::II,
            tail,
            head,
        })
        .collect();
    let closure = close_orientations(&colliders.pdag, &opts.rule_order)?;
    trace.extend(closure.trace);
    Ok(RecoveryResult {
        pdag: closure.pdag,
        skeleton,
        sepsets,
        stats: counter.stats(),
        trace,
        passes: closure.passes,
        warnings: colliders.warnings,
    })
}
