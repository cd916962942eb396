//! Conditional-independence oracles.
//!
//! [`PerfectOracle`] answers from d-separation in a known DAG,
//! [`FisherZOracle`] from partial correlations in sampled data, and
//! [`CountingOracle`] caches and counts the queries of any other oracle.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use nalgebra::DMatrix;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::graph::{Dag, Graph};
use crate::nodeset::{NodeId, NodeSet, MAX_NODES};
use crate::separation::{d_separated, SeparationQuery};

/// Answers "is `x` independent of `y` given `z`" over a fixed variable set.
///
/// Implementations must be symmetric in `x` and `y` and deterministic.
pub trait IndependenceOracle: Send + Sync {
    /// Variable names, indexed by [`NodeId`].
    fn labels(&self) -> &[String];

    fn is_independent(&self, x: NodeId, y: NodeId, z: NodeSet) -> Result<bool>;

    fn variable_count(&self) -> usize {
        self.labels().len()
    }
}

impl<T: IndependenceOracle + ?Sized> IndependenceOracle for &T {
    fn labels(&self) -> &[String] {
        (**self).labels()
    }

    fn is_independent(&self, x: NodeId, y: NodeId, z: NodeSet) -> Result<bool> {
        (**self).is_independent(x, y, z)
    }
}

impl<T: IndependenceOracle + ?Sized> IndependenceOracle for Box<T> {
    fn labels(&self) -> &[String] {
        (**self).labels()
    }

    fn is_independent(&self, x: NodeId, y: NodeId, z: NodeSet) -> Result<bool> {
        (**self).is_independent(x, y, z)
    }
}

fn check_query(n: usize, x: NodeId, y: NodeId, z: NodeSet) -> Result<()> {
    if x.0 >= n || y.0 >= n || !z.is_subset(NodeSet::full(n)) {
        return Err(Error::InvalidQuery(format!(
            "query names a variable outside 0..{n}"
        )));
    }
    SeparationQuery::new(x, y, z).map(|_| ())
}

/// Independence read off d-separation in a ground-truth DAG.
#[derive(Debug, Clone)]
pub struct PerfectOracle {
    truth: Dag,
}

impl PerfectOracle {
    pub fn new(truth: Dag) -> Self {
        PerfectOracle { truth }
    }

    pub fn truth(&self) -> &Dag {
        &self.truth
    }
}

pub fn perfect_oracle(truth: Dag) -> PerfectOracle {
    PerfectOracle::new(truth)
}

impl IndependenceOracle for PerfectOracle {
    fn labels(&self) -> &[String] {
        self.truth.labels()
    }

    fn is_independent(&self, x: NodeId, y: NodeId, z: NodeSet) -> Result<bool> {
        d_separated(&self.truth, &SeparationQuery::new(x, y, z)?)
    }
}

/// Real-valued samples with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<String>,
    /// Row-major.
    values: Vec<f64>,
    n_rows: usize,
}

impl Dataset {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidDataset("no columns".into()));
        }
        if columns.len() > MAX_NODES {
            return Err(Error::TooManyNodes(columns.len()));
        }
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].contains(c) {
                return Err(Error::InvalidDataset(format!("duplicate column `{c}`")));
            }
        }
        if rows.is_empty() {
            return Err(Error::InvalidDataset("no rows".into()));
        }
        let width = columns.len();
        let mut values = Vec::with_capacity(rows.len() * width);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::InvalidDataset(format!(
                    "row {} has {} values, expected {width}",
                    i + 1,
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "row {} has value {v}",
                    i + 1
                )));
            }
            values.extend_from_slice(row);
        }
        Ok(Dataset {
            columns,
            values,
            n_rows: rows.len(),
        })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.n_cols();
        &self.values[i * w..(i + 1) * w]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().skip(j).step_by(self.n_cols()).copied()
    }

    /// Applies `f` to every value of column `j`.
    pub fn map_column(&mut self, j: usize, f: impl Fn(f64) -> f64) {
        let w = self.n_cols();
        for v in self.values.iter_mut().skip(j).step_by(w) {
            *v = f(*v);
        }
    }

    /// Pearson correlation matrix. Fails on constant columns.
    pub fn correlation_matrix(&self) -> Result<DMatrix<f64>> {
        let (n, w) = (self.n_rows as f64, self.n_cols());
        let means: Vec<f64> = (0..w).map(|j| self.column(j).sum::<f64>() / n).collect();
        let mut cov = DMatrix::<f64>::zeros(w, w);
        for i in 0..self.n_rows {
            let row = self.row(i);
            for a in 0..w {
                let da = row[a] - means[a];
                for b in a..w {
                    cov[(a, b)] += da * (row[b] - means[b]);
                }
            }
        }
        for a in 0..w {
            if cov[(a, a)] <= 0.0 {
                return Err(Error::InvalidDataset(format!(
                    "column `{}` has zero variance",
                    self.columns[a]
                )));
            }
        }
        let mut corr = DMatrix::<f64>::identity(w, w);
        for a in 0..w {
            for b in a + 1..w {
                let r = cov[(a, b)] / (cov[(a, a)] * cov[(b, b)]).sqrt();
                corr[(a, b)] = r;
                corr[(b, a)] = r;
            }
        }
        Ok(corr)
    }

    /// Reads CSV: a header row of labels, then one numeric row per sample.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let columns: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("row {}: `{s}` is not a number", i + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Dataset::new(columns, rows)
    }

    pub fn read_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Dataset::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.columns)?;
        for i in 0..self.n_rows {
            w.write_record(self.row(i).iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Outcome of one Fisher-z test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherZTest {
    pub partial_correlation: f64,
    pub statistic: f64,
    pub p_value: f64,
    pub independent: bool,
}

/// Gaussian conditional-independence test on partial correlations.
#[derive(Debug, Clone)]
pub struct FisherZOracle {
    labels: Vec<String>,
    corr: DMatrix<f64>,
    n: usize,
    alpha: f64,
    critical: f64,
}

/// Reciprocal condition numbers below this count as singular.
const MIN_RCOND: f64 = 1e-12;

impl FisherZOracle {
    pub const DEFAULT_ALPHA: f64 = 0.01;

    pub fn new(data: &Dataset, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        Ok(FisherZOracle {
            labels: data.columns().to_vec(),
            corr: data.correlation_matrix()?,
            n: data.n_rows(),
            alpha,
            critical: normal.inverse_cdf(1.0 - alpha / 2.0),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Two-sided standard-normal quantile the statistic is compared against.
    pub fn critical_value(&self) -> f64 {
        self.critical
    }

    /// Partial correlation of `x` and `y` given `z`, from the inverse of the
    /// correlation submatrix over `{x, y} ∪ z`.
    pub fn partial_correlation(&self, x: NodeId, y: NodeId, z: NodeSet) -> Result<f64> {
        check_query(self.labels.len(), x, y, z)?;
        if z.is_empty() {
            return Ok(self.corr[(x.0, y.0)]);
        }
        let idx: Vec<usize> = [x.0, y.0]
            .into_iter()
            .chain(z.iter().map(|v| v.0))
            .collect();
        let k = idx.len();
        let sub = DMatrix::from_fn(k, k, |i, j| self.corr[(idx[i], idx[j])]);
        let singular = || {
            let mut names: Vec<&str> = idx.iter().map(|&i| self.labels[i].as_str()).collect();
            names.sort_unstable();
            Error::SingularMatrix(format!("{{{}}}", names.join(", ")))
        };
        let sv = sub.clone().singular_values();
        let (lo, hi) = (sv.min(), sv.max());
        // also rejects NaN entries
        if hi.is_nan() || hi <= 0.0 || lo / hi < MIN_RCOND {
            return Err(singular());
        }
        let p = sub.try_inverse().ok_or_else(singular)?;
        Ok(-p[(0, 1)] / (p[(0, 0)] * p[(1, 1)]).sqrt())
    }

    pub fn test(&self, x: NodeId, y: NodeId, z: NodeSet) -> Result<FisherZTest> {
        check_query(self.labels.len(), x, y, z)?;
        let needed = z.len() + 3;
        if self.n <= needed {
            return Err(Error::InsufficientSamples {
                needed,
                have: self.n,
            });
        }
        let r = self.partial_correlation(x, y, z)?;
        let statistic = if r.abs() >= 1.0 {
            f64::INFINITY
        } else {
            ((self.n - needed) as f64).sqrt() * r.atanh()
        };
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        let p_value = 2.0 * (1.0 - normal.cdf(statistic.abs()));
        Ok(FisherZTest {
            partial_correlation: r,
            statistic,
            p_value,
            independent: statistic.abs() <= self.critical,
        })
    }
}

pub fn fisher_z_oracle(data: &Dataset, alpha: f64) -> Result<FisherZOracle> {
    FisherZOracle::new(data, alpha)
}

impl IndependenceOracle for FisherZOracle {
    fn labels(&self) -> &[String] {
        &self.labels
    }

    fn is_independent(&self, x: NodeId, y: NodeId, z: NodeSet) -> Result<bool> {
        self.test(x, y, z).map(|t| t.independent)
    }
}

/// Query counts by distinct (pair, conditioning set) key.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct OracleStats {
    pub queries_total: u64,
    pub queries_by_conditioning_size: BTreeMap<usize, u64>,
}

type CacheKey = (NodeId, NodeId, NodeSet);

/// Caching, counting wrapper. Keys are canonical: `(x, y)` unordered, so
/// `(x, y, z)` and `(y, x, z)` share an entry.
pub struct CountingOracle<O> {
    inner: O,
    cache: Mutex<HashMap<CacheKey, bool>>,
    inner_calls: AtomicU64,
}

impl<O: IndependenceOracle> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        CountingOracle {
            inner,
            cache: Mutex::new(HashMap::new()),
            inner_calls: AtomicU64::new(0),
        }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    /// Calls forwarded to the wrapped oracle. Concurrent misses on the same
    /// key may each forward, so this can exceed `stats().queries_total`.
    pub fn inner_calls(&self) -> u64 {
        self.inner_calls.load(Ordering::Relaxed)
    }

    pub fn stats(&self) -> OracleStats {
        let cache = self.cache.lock().expect("oracle cache poisoned");
        let mut stats = OracleStats::default();
        for (_, _, z) in cache.keys() {
            stats.queries_total += 1;
            *stats
                .queries_by_conditioning_size
                .entry(z.len())
                .or_default() += 1;
        }
        stats
    }
}

pub fn counting<O: IndependenceOracle>(inner: O) -> CountingOracle<O> {
    CountingOracle::new(inner)
}

impl<O: IndependenceOracle> IndependenceOracle for CountingOracle<O> {
    fn labels(&self) -> &[String] {
        self.inner.labels()
    }

    fn is_independent(&self, x: NodeId, y: NodeId, z: NodeSet) -> Result<bool> {
        let key = if x <= y { (x, y, z) } else { (y, x, z) };
        if let Some(&hit) = self.cache.lock().expect("oracle cache poisoned").get(&key) {
            return Ok(hit);
        }
        self.inner_calls.fetch_add(1, Ordering::Relaxed);
        let answer = self.inner.is_independent(key.0, key.1, key.2)?;
        self.cache
            .lock()
            .expect("oracle cache poisoned")
            .insert(key, answer);
        Ok(answer)
    }
}
