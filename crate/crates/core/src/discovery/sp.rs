use super::{dag_from_order, DiscoveryReport};
use crate::citest::CiOracle;
use crate::error::{Error, Result};
use crate::graphs::Dag;

const SP_CAP: usize = 7;

/// Sparsest-permutation output.
#[derive(Clone, Debug, PartialEq)]
pub struct SpResult {
    /// Edge-minimal DAGs, one per Markov equivalence class, in order of the
    /// first permutation producing them.
    pub graphs: Vec<Dag>,
    pub edges: usize,
    /// Every permutation with the edge count of its DAG.
    pub per_permutation: Vec<(Vec<usize>, usize)>,
    pub report: DiscoveryReport,
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut next = Some((0..n).collect::<Vec<_>>());
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut p = cur.clone();
        if let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) {
            let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor");
            p.swap(i - 1, j);
            p[i..].reverse();
            next = Some(p);
        }
        Some(cur)
    })
}

/// Runs the order-based construction for every permutation and keeps the
/// sparsest results.
pub fn sp(oracle: &mut CiOracle) -> Result<SpResult> {
    let n = oracle.universe().len();
    if n > SP_CAP {
        return Err(Error::CapExceeded {
            what: "sparsest permutation",
            size: n,
            cap: SP_CAP,
        });
    }
    let start = oracle.log().len();
    let mut per_permutation = Vec::new();
    let mut best: Vec<Dag> = Vec::new();
    let mut edges = usize::MAX;
    for order in permutations(n) {
        let g = dag_from_order(oracle, &order)?.graph;
        let k = g.edge_count();
        per_permutation.push((order, k));
        if k < edges {
            edges = k;
            best.clear();
        }
        if k == edges && !best.iter().any(|b| b.markov_equivalent(&g)) {
            best.push(g);
        }
    }
    let mut report = DiscoveryReport::since(oracle, start);
    report.tie = best.len() > 1;
    Ok(SpResult {
        graphs: best,
        edges,
        per_permutation,
        report,
    })
}
