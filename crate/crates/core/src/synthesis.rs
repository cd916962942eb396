//! Random ground truths and linear-Gaussian sampling.
//!
//! All randomness comes from `ChaCha8Rng` seeded with `seed_from_u64`, so a
//! given seed yields the same graph or dataset on every platform.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::{Dag, Graph};
use crate::nodeset::{NodeId, MAX_NODES};
use crate::oracle::Dataset;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Labels `X1 .. Xn`.
pub fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("X{i}")).collect()
}

/// A DAG on `X1 .. Xn`: a random permutation fixes the topological order and
/// each forward pair becomes an edge with probability `p`.
pub fn random_dag(n: usize, p: f64, seed: u64) -> Result<Dag> {
    if n == 0 || n > MAX_NODES {
        return Err(Error::InvalidArgument(format!(
            "node count must lie in 1..={MAX_NODES}, got {n}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "edge probability must lie in [0, 1], got {p}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut dag = Dag::new(default_labels(n))?;
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                dag.add_edge(NodeId(order[i]), NodeId(order[j]))?;
            }
        }
    }
    Ok(dag)
}

/// Linear structural equations with independent Gaussian noise:
/// each node is the weighted sum of its parents plus `N(0, noise_sd²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    dag: Dag,
    weights: BTreeMap<(NodeId, NodeId), f64>,
    noise_sd: Vec<f64>,
}

impl LinearModel {
    pub fn new(
        dag: Dag,
        weights: BTreeMap<(NodeId, NodeId), f64>,
        noise_sd: Vec<f64>,
    ) -> Result<Self> {
        if noise_sd.len() != dag.node_count() {
            return Err(Error::InvalidModel(format!(
                "{} noise scales for {} nodes",
                noise_sd.len(),
                dag.node_count()
            )));
        }
        if let Some(s) = noise_sd.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::InvalidModel(format!(
                "noise scale {s} is not positive"
            )));
        }
        let edges = dag.edges();
        if weights.len() != edges.len() || !edges.iter().all(|e| weights.contains_key(e)) {
            return Err(Error::InvalidModel(
                "weights must cover exactly the edges of the graph".into(),
            ));
        }
        if let Some(w) = weights.values().find(|w| !w.is_finite()) {
            return Err(Error::InvalidModel(format!("weight {w} is not finite")));
        }
        Ok(LinearModel {
            dag,
            weights,
            noise_sd,
        })
    }

    /// Every weight and every noise scale equal to one.
    pub fn unit(dag: Dag) -> Self {
        let weights = dag.edges().into_iter().map(|e| (e, 1.0)).collect();
        let noise_sd = vec![1.0; dag.node_count()];
        LinearModel {
            dag,
            weights,
            noise_sd,
        }
    }

    /// Weights drawn uniformly from `[-1.5, -0.5] ∪ [0.5, 1.5]`, unit noise.
    pub fn random_weights(dag: Dag, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let weights = dag
            .edges()
            .into_iter()
            .map(|e| {
                let magnitude = rng.gen_range(0.5..=1.5);
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                (e, sign * magnitude)
            })
            .collect();
        let noise_sd = vec![1.0; dag.node_count()];
        LinearModel {
            dag,
            weights,
            noise_sd,
        }
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn weight(&self, tail: NodeId, head: NodeId) -> Option<f64> {
        self.weights.get(&(tail, head)).copied()
    }

    pub fn noise_sd(&self, v: NodeId) -> f64 {
        self.noise_sd[v.0]
    }
}

/// Draws `n_rows` samples, generating nodes in topological order.
pub fn sample(model: &LinearModel, n_rows: usize, seed: u64) -> Result<Dataset> {
    if n_rows == 0 {
        return Err(Error::InvalidArgument(
            "row count must be at least 1".into(),
        ));
    }
    let dag = &model.dag;
    let order = dag.topological_order();
    let mut rng = rng_from_seed(seed);
    let mut rows = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let mut row = vec![0.0; dag.node_count()];
        for &v in &order {
            let noise: f64 = rng.sample(StandardNormal);
            let mut value = model.noise_sd[v.0] * noise;
            for p in dag.parents_of(v) {
                value += model.weights[&(p, v)] * row[p.0];
            }
            row[v.0] = value;
        }
        rows.push(row);
    }
    Dataset::new(dag.labels().to_vec(), rows)
}
