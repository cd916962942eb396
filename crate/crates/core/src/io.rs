//! Graph JSON and DOT formats.
//!
//! JSON: `{"nodes": [...], "directed": [[tail, head], ...], "undirected": [[a, b], ...]}`.
//! A DAG has no `undirected` entries and an undirected graph no `directed`
//! ones; either key may be omitted on input. Output lists edges sorted by
//! node index, undirected pairs with the lower index first.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dag, Graph, Pdag, SepsetTable, UGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub directed: Vec<[String; 2]>,
    #[serde(default)]
    pub undirected: Vec<[String; 2]>,
}

impl GraphFile {
    pub fn from_pdag(g: &Pdag) -> Self {
        let pair = |(a, b): (crate::NodeId, crate::NodeId)| {
            [g.label(a).to_string(), g.label(b).to_string()]
        };
        GraphFile {
            nodes: g.labels().to_vec(),
            directed: g.directed_edges().into_iter().map(pair).collect(),
            undirected: g.undirected_edges().into_iter().map(pair).collect(),
        }
    }

    pub fn to_pdag(&self) -> Result<Pdag> {
        let mut g = Pdag::new(self.nodes.iter().cloned())?;
        for [a, b] in &self.directed {
            let (a, b) = (g.node(a)?, g.node(b)?);
            g.add_directed(a, b)?;
        }
        for [a, b] in &self.undirected {
            let (a, b) = (g.node(a)?, g.node(b)?);
            g.add_undirected(a, b)?;
        }
        Ok(g)
    }
}

pub fn pdag_from_json(text: &str) -> Result<Pdag> {
    serde_json::from_str::<GraphFile>(text)?.to_pdag()
}

pub fn dag_from_json(text: &str) -> Result<Dag> {
    Dag::try_from(pdag_from_json(text)?)
}

pub fn ugraph_from_json(text: &str) -> Result<UGraph> {
    UGraph::try_from(pdag_from_json(text)?)
}

pub fn pdag_to_json(g: &Pdag) -> String {
    serde_json::to_string_pretty(&GraphFile::from_pdag(g)).expect("graph serializes")
}

fn dot_id(label: &str) -> String {
    let plain = label
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if plain {
        label.to_string()
    } else {
        format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

/// DOT `digraph`; undirected edges carry `[dir=none]`.
pub fn pdag_to_dot(g: &Pdag) -> String {
    let mut out = String::from("digraph {\n");
    for l in g.labels() {
        let _ = writeln!(out, "  {};", dot_id(l));
    }
    for (a, b) in g.directed_edges() {
        let _ = writeln!(out, "  {} -> {};", dot_id(g.label(a)), dot_id(g.label(b)));
    }
    for (a, b) in g.undirected_edges() {
        let _ = writeln!(
            out,
            "  {} -> {} [dir=none];",
            dot_id(g.label(a)),
            dot_id(g.label(b))
        );
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SepsetEntry {
    pub pair: [String; 2],
    pub sepset: Vec<String>,
}

pub fn sepsets_to_entries<G: Graph>(g: &G, table: &SepsetTable) -> Vec<SepsetEntry> {
    table
        .iter()
        .map(|((a, b), z)| SepsetEntry {
            pair: [g.label(a).to_string(), g.label(b).to_string()],
            sepset: g.label_set(z),
        })
        .collect()
}

pub fn sepsets_from_entries<G: Graph>(g: &G, entries: &[SepsetEntry]) -> Result<SepsetTable> {
    let mut t = SepsetTable::new();
    for e in entries {
        let (a, b) = (g.node(&e.pair[0])?, g.node(&e.pair[1])?);
        let mut z = crate::NodeSet::EMPTY;
        for l in &e.sepset {
            z.insert(g.node(l)?);
        }
        if z.contains(a) || z.contains(b) || a == b {
            return Err(Error::Parse(format!(
                "malformed separating set for `{}`, `{}`",
                e.pair[0], e.pair[1]
            )));
        }
        t.insert(a, b, z);
    }
    Ok(t)
}
