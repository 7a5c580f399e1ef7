//! Synthetic ground truths and data: random trees and DAGs, linear-Gaussian
//! models, binary Bayesian networks and Gibbs-sampled pairwise factor models.

use nalgebra::DMatrix;
use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cimodel::VariableUniverse;
use crate::citest::Dataset;
use crate::error::{Error, Result};
use crate::graphs::{Dag, UndirectedGraph};

/// Seeded ChaCha8 generator. Child streams are derived from the seed and an
/// index, so parallel trials are reproducible regardless of scheduling.
#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub const ALGORITHM: &'static str = "chacha8";

    pub fn new(seed: u64) -> Self {
        Rng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream number `index`; does not advance `self`.
    pub fn child(&self, index: u64) -> Rng {
        Rng::new(splitmix(self.seed ^ splitmix(index.wrapping_add(0x9e37_79b9_7f4a_7c15))))
    }

    /// Words consumed so far.
    pub fn position(&self) -> u128 {
        self.inner.get_word_pos()
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngCore for Rng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Maximum-weight spanning tree (Kruskal) of a complete graph with uniform
/// `[0, 1)` weights.
pub fn random_spanning_tree(universe: &VariableUniverse, rng: &mut Rng) -> UndirectedGraph {
    let n = universe.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            pairs.push((rng.random::<f64>(), a, b));
        }
    }
    pairs.sort_by(|p, q| q.0.total_cmp(&p.0));
    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut [usize], mut v: usize) -> usize {
        while root[v] != v {
            root[v] = root[root[v]];
            v = root[v];
        }
        v
    }
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for (_, a, b) in pairs {
        let (ra, rb) = (find(&mut root, a), find(&mut root, b));
        if ra != rb {
            root[ra] = rb;
            edges.push((a, b));
        }
    }
    UndirectedGraph::new(universe.clone(), &edges).expect("tree edges are valid")
}

/// A random spanning tree oriented away from a uniformly chosen root.
pub fn random_oriented_tree(universe: &VariableUniverse, rng: &mut Rng) -> Dag {
    let t = random_spanning_tree(universe, rng);
    let root = rng.random_range(0..universe.len());
    t.orient_from(root).expect("a tree orients to a DAG")
}

/// Erdős–Rényi DAG: each forward edge `i -> j` (`i < j`) independently with
/// probability `p`.
pub fn er_dag(universe: &VariableUniverse, p: f64, rng: &mut Rng) -> Result<Dag> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Precondition(format!("edge probability {p} outside [0, 1]")));
    }
    let n = universe.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Dag::new(universe.clone(), &edges)
}

/// Linear structural equations with unit-variance Gaussian noise.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearGaussianScm {
    dag: Dag,
    /// `weights[(child, parent)]`.
    weights: DMatrix<f64>,
}

impl LinearGaussianScm {
    /// Explicit coefficients, one per edge `(tail, head, value)`.
    pub fn new(dag: Dag, coefficients: &[(usize, usize, f64)]) -> Result<Self> {
        let n = dag.n();
        let mut weights = DMatrix::zeros(n, n);
        for &(t, h, w) in coefficients {
            if !dag.has_edge(t, h) {
                return Err(Error::EdgeAbsent(format!(
                    "{} -> {}",
                    dag.universe().name(t),
                    dag.universe().name(h)
                )));
            }
            weights[(h, t)] = w;
        }
        Ok(LinearGaussianScm { dag, weights })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn coefficient(&self, tail: usize, head: usize) -> f64 {
        self.weights[(head, tail)]
    }

    /// `(I - B)^{-1} (I - B)^{-T}`.
    pub fn exact_covariance(&self) -> DMatrix<f64> {
        let n = self.dag.n();
        let a = (DMatrix::identity(n, n) - &self.weights)
            .try_inverse()
            .expect("I - B is unit triangular up to permutation");
        &a * a.transpose()
    }

    /// Ancestral sampling of `m` rows.
    pub fn sample(&self, m: usize, rng: &mut Rng) -> Dataset {
        let n = self.dag.n();
        let order = self.dag.topological_order();
        let mut cols = vec![vec![0.0; m]; n];
        for r in 0..m {
            for &v in &order {
                let mut x: f64 = rng.sample(StandardNormal);
                for p in self.dag.parents(v).iter() {
                    x += self.weights[(v, p)] * cols[p][r];
                }
                cols[v][r] = x;
            }
        }
        Dataset::continuous(self.dag.universe().clone(), cols).expect("finite samples")
    }
}

/// Coefficient uniform on `(-1, -0.1] ∪ [0.1, 1)`.
pub fn random_coefficient(rng: &mut Rng) -> f64 {
    let m = rng.random_range(0.1..1.0);
    if rng.random_bool(0.5) {
        m
    } else {
        -m
    }
}

/// Random coefficients for every edge of `dag`.
pub fn linear_gaussian(dag: &Dag, rng: &mut Rng) -> LinearGaussianScm {
    let coefs: Vec<(usize, usize, f64)> = dag
        .edges()
        .into_iter()
        .map(|(t, h)| (t, h, random_coefficient(rng)))
        .collect();
    LinearGaussianScm::new(dag.clone(), &coefs).expect("edges of the DAG")
}

/// Bayesian network over binary variables.
///
/// `tables[v][k]` is `P(v = 1 | parents = k)` where bit `i` of `k` is the
/// value of the `i`-th parent in ascending index order.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryBn {
    dag: Dag,
    pub tables: Vec<Vec<f64>>,
}

impl BinaryBn {
    pub fn new(dag: Dag, tables: Vec<Vec<f64>>) -> Result<Self> {
        if tables.len() != dag.n() {
            return Err(Error::TableShape(format!("{} tables for {} variables", tables.len(), dag.n())));
        }
        for (v, t) in tables.iter().enumerate() {
            let want = 1usize << dag.parents(v).len();
            if t.len() != want {
                return Err(Error::TableShape(format!(
                    "table of {} has {} rows, expected {want}",
                    dag.universe().name(v),
                    t.len()
                )));
            }
            if let Some(p) = t.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(Error::TableShape(format!(
                    "probability {p} in table of {}",
                    dag.universe().name(v)
                )));
            }
        }
        Ok(BinaryBn { dag, tables })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    /// `W -> X, W -> Y, X -> Z <- Y` with tables drawn from `[0.3, 0.7)`.
    ///
    /// The cells for `W = 1` and the off-diagonal cells of `Z` are the
    /// complements of the drawn ones.
    pub fn diamond(rng: &mut Rng) -> Self {
        let u = VariableUniverse::new(&["W", "X", "Y", "Z"]).expect("names");
        let dag = Dag::new(u, &[(0, 1), (0, 2), (1, 3), (2, 3)]).expect("diamond");
        let mut draw = || rng.random_range(0.3..0.7);
        let w = draw();
        let x0 = draw();
        let y0 = draw();
        let z00 = draw();
        let z11 = draw();
        // Z's parents are X (bit 0) and Y (bit 1).
        let z = vec![z00, 1.0 - z11, 1.0 - z00, z11];
        BinaryBn::new(dag, vec![vec![w], vec![x0, 1.0 - x0], vec![y0, 1.0 - y0], z])
            .expect("diamond tables")
    }

    pub fn sample(&self, m: usize, rng: &mut Rng) -> Dataset {
        let dag = self.dag();
        let n = dag.n();
        let order = dag.topological_order();
        let mut cols = vec![vec![0u32; m]; n];
        for r in 0..m {
            for &v in &order {
                let k = dag
                    .parents(v)
                    .iter()
                    .enumerate()
                    .fold(0usize, |k, (i, p)| k | (cols[p][r] as usize) << i);
                cols[v][r] = u32::from(rng.random::<f64>() < self.tables[v][k]);
            }
        }
        binary_dataset(dag.universe(), cols)
    }
}

fn binary_dataset(universe: &VariableUniverse, cols: Vec<Vec<u32>>) -> Dataset {
    let mut d = Dataset::discrete(universe.clone(), cols).expect("rectangular");
    d.ensure_levels(2);
    d
}

/// Samples `m` rows of `bn`.
pub fn binary_bn_sample(bn: &BinaryBn, m: usize, rng: &mut Rng) -> Dataset {
    bn.sample(m, rng)
}

/// Pairwise factor model over binary variables; `factors[e]` holds
/// `φ(0,0), φ(0,1), φ(1,0), φ(1,1)` for edge `e` of the graph.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorModel {
    graph: UndirectedGraph,
    edges: Vec<(usize, usize)>,
    factors: Vec<[f64; 4]>,
}

impl FactorModel {
    pub fn new(graph: UndirectedGraph, factors: Vec<[f64; 4]>) -> Result<Self> {
        let edges = graph.edges();
        if factors.len() != edges.len() {
            return Err(Error::TableShape(format!(
                "{} factors for {} edges",
                factors.len(),
                edges.len()
            )));
        }
        if factors.iter().flatten().any(|v| !(*v > 0.0)) {
            return Err(Error::TableShape("factor values must be positive".into()));
        }
        Ok(FactorModel { graph, edges, factors })
    }

    /// `φ(0,0)` and `φ(1,1)` from `[0.1, 0.3)`, the mixed cells their
    /// complements.
    pub fn random(graph: UndirectedGraph, rng: &mut Rng) -> Self {
        let factors = graph
            .edges()
            .iter()
            .map(|_| {
                let a = rng.random_range(0.1..0.3);
                let d = rng.random_range(0.1..0.3);
                [a, 1.0 - a, 1.0 - d, d]
            })
            .collect();
        FactorModel::new(graph, factors).expect("positive factors")
    }

    /// `W - X, W - Y, X - Z, Y - Z` with random factors.
    pub fn square(rng: &mut Rng) -> Self {
        let u = VariableUniverse::new(&["W", "X", "Y", "Z"]).expect("names");
        let g = UndirectedGraph::new(u, &[(0, 1), (0, 2), (1, 3), (2, 3)]).expect("square");
        FactorModel::random(g, rng)
    }

    pub fn graph(&self) -> &UndirectedGraph {
        &self.graph
    }

    pub fn factors(&self) -> &[[f64; 4]] {
        &self.factors
    }

    /// Exact joint probability table, index bit `v` = value of variable `v`.
    pub fn joint(&self) -> Vec<f64> {
        let n = self.graph.n();
        let mut p: Vec<f64> = (0..1usize << n)
            .map(|s| {
                self.edges
                    .iter()
                    .zip(&self.factors)
                    .map(|(&(a, b), f)| f[(s >> a & 1) << 1 | (s >> b & 1)])
                    .product()
            })
            .collect();
        let z: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= z);
        p
    }
}

/// Gibbs sampler settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GibbsConfig {
    /// Sweeps discarded before the first sample.
    pub burn_in: usize,
    /// Sweeps between retained samples.
    pub thinning: usize,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        GibbsConfig {
            burn_in: 1000,
            thinning: 2,
        }
    }
}

/// Single-site Gibbs chain from a uniform random start; one sweep updates
/// every variable in index order.
pub fn factor_gibbs_sample(model: &FactorModel, m: usize, cfg: GibbsConfig, rng: &mut Rng) -> Dataset {
    let n = model.graph.n();
    let mut incident: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for (e, &(a, b)) in model.edges.iter().enumerate() {
        incident[a].push((e, true));
        incident[b].push((e, false));
    }
    let mut state: Vec<usize> = (0..n).map(|_| usize::from(rng.random_bool(0.5))).collect();
    let sweep = |state: &mut Vec<usize>, rng: &mut Rng| {
        for v in 0..n {
            let mut w = [1.0f64; 2];
            for (val, wv) in w.iter_mut().enumerate() {
                for &(e, first) in &incident[v] {
                    let (a, b) = model.edges[e];
                    let other = if first { state[b] } else { state[a] };
                    let idx = if first { val << 1 | other } else { other << 1 | val };
                    *wv *= model.factors[e][idx];
                }
            }
            state[v] = usize::from(rng.random::<f64>() * (w[0] + w[1]) < w[1]);
        }
    };
    for _ in 0..cfg.burn_in {
        sweep(&mut state, rng);
    }
    let mut cols = vec![vec![0u32; m]; n];
    for r in 0..m {
        for _ in 0..cfg.thinning.max(1) {
            sweep(&mut state, rng);
        }
        for v in 0..n {
            cols[v][r] = state[v] as u32;
        }
    }
    binary_dataset(model.graph.universe(), cols)
}
