//! Minimum Markov distance decoding over trees and DAGs.

use rayon::prelude::*;

use crate::cimodel::{all_triples, CiTriple, IndependenceModel, TripleSet, VarSet, VariableUniverse};
use crate::error::{Error, Result};
use crate::graphs::{prufer_decode, Dag, GraphClass, UndirectedGraph, DAG_CAP, TREE_CAP};
use crate::redundancy::Codebook;

/// Every graph at minimum distance from a model.
#[derive(Clone, Debug, PartialEq)]
pub struct Mmd<G> {
    /// Sorted by edge list; the first entry is the representative.
    pub minimizers: Vec<G>,
    pub distance: usize,
    /// Smallest distance of any graph outside the minimizer set.
    pub runner_up: Option<usize>,
}

impl<G> Mmd<G> {
    pub fn representative(&self) -> &G {
        &self.minimizers[0]
    }

    pub fn is_unique(&self) -> bool {
        self.minimizers.len() == 1
    }
}

/// Singleton triples with exactly one conditioning variable.
pub fn tree_statements(universe: &VariableUniverse) -> TripleSet {
    all_triples(universe, true, Some(1))
        .expect("singleton enumeration")
        .iter()
        .filter(|t| t.z.len() == 1)
        .copied()
        .collect()
}

/// Observation counts for one triple: how many say independent, how many
/// say dependent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tally {
    pub triple: CiTriple,
    pub independent: u32,
    pub dependent: u32,
}

impl Tally {
    fn cost(&self, separated: bool) -> usize {
        (if separated { self.dependent } else { self.independent }) as usize
    }
}

fn observed(model: &IndependenceModel, s: &TripleSet) -> Result<Vec<(CiTriple, bool)>> {
    s.iter()
        .map(|t| match model.verdict(t) {
            Some(v) => Ok((*t, v.is_independent())),
            None => Err(Error::UnknownStatus(model.universe().fmt_triple(t))),
        })
        .collect()
}

/// Tree distance to the observations. Path interiors are precomputed so a
/// singleton triple is separated iff its conditioning set meets the path.
fn tree_distance(n: usize, edges: &[(usize, usize)], obs: &[Tally], tree: &UndirectedGraph) -> usize {
    let mut adj = vec![VarSet::EMPTY; n];
    for &(a, b) in edges {
        adj[a] = adj[a].with(b);
        adj[b] = adj[b].with(a);
    }
    let mut interior = vec![VarSet::EMPTY; n * n];
    for root in 0..n {
        let mut stack = vec![root];
        let mut seen = VarSet::singleton(root);
        while let Some(v) = stack.pop() {
            for w in adj[v].minus(seen).iter() {
                seen = seen.with(w);
                interior[root * n + w] = if v == root {
                    VarSet::EMPTY
                } else {
                    interior[root * n + v].with(v)
                };
                stack.push(w);
            }
        }
    }
    obs.iter()
        .map(|o| {
            let t = &o.triple;
            let sep = match t.pair() {
                Some((x, y)) => !interior[x * n + y].is_disjoint(t.z),
                None => tree.separates(t.x, t.y, t.z),
            };
            o.cost(sep)
        })
        .sum()
}

fn tree_from_code(n: usize, mut code: u64) -> Vec<(usize, usize)> {
    let len = n.saturating_sub(2);
    let mut seq = vec![0usize; len];
    for s in seq.iter_mut() {
        *s = (code % n as u64) as usize;
        code /= n as u64;
    }
    prufer_decode(&seq, n)
}

fn split<T: Clone>(mut scored: Vec<(usize, Vec<(usize, usize)>, T)>) -> (usize, Option<usize>, Vec<T>) {
    scored.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    let best = scored[0].0;
    let runner_up = scored.iter().map(|s| s.0).find(|&d| d > best);
    let minimizers = scored
        .into_iter()
        .take_while(|s| s.0 == best)
        .map(|s| s.2)
        .collect();
    (best, runner_up, minimizers)
}

/// Spanning trees minimising the Markov distance to `model` over
/// `statements` (by default every singleton triple with one conditioning
/// variable).
pub fn mmd_tree(model: &IndependenceModel, statements: Option<&TripleSet>) -> Result<Mmd<UndirectedGraph>> {
    let u = model.universe();
    let default;
    let s = match statements {
        Some(s) => s,
        None => {
            default = tree_statements(u);
            &default
        }
    };
    let tally: Vec<Tally> = observed(model, s)?
        .into_iter()
        .map(|(triple, indep)| Tally {
            triple,
            independent: u32::from(indep),
            dependent: u32::from(!indep),
        })
        .collect();
    mmd_tree_tally(u, &tally)
}

/// Spanning trees minimising the total number of observations they
/// disagree with. Each observation of a tallied triple counts once, so
/// statements about both orderings of a pair may disagree.
pub fn mmd_tree_tally(u: &VariableUniverse, tally: &[Tally]) -> Result<Mmd<UndirectedGraph>> {
    let n = u.len();
    if n > TREE_CAP {
        return Err(Error::CapExceeded {
            what: "tree decoding",
            size: n,
            cap: TREE_CAP,
        });
    }
    for o in tally {
        u.check(&o.triple)?;
    }
    let total = if n < 2 { 1 } else { (n as u64).pow(n as u32 - 2) };
    let needs_graph = tally.iter().any(|o| o.triple.pair().is_none());
    let scored: Vec<(usize, Vec<(usize, usize)>)> = (0..total)
        .into_par_iter()
        .map(|code| {
            let edges = tree_from_code(n, code);
            let g = if needs_graph {
                UndirectedGraph::new(u.clone(), &edges)?
            } else {
                UndirectedGraph::empty(u.clone())
            };
            Ok((tree_distance(n, &edges, tally, &g), edges))
        })
        .collect::<Result<_>>()?;
    // Materialise only the minimizers.
    let best = scored.iter().map(|s| s.0).min().expect("at least one tree");
    let runner_up = scored.iter().map(|s| s.0).filter(|&d| d > best).min();
    let mut minimizers: Vec<Vec<(usize, usize)>> = scored
        .into_iter()
        .filter(|s| s.0 == best)
        .map(|s| s.1)
        .collect();
    minimizers.sort();
    Ok(Mmd {
        minimizers: minimizers
            .iter()
            .map(|e| UndirectedGraph::new(u.clone(), e))
            .collect::<Result<_>>()?,
        distance: best,
        runner_up,
    })
}

/// DAGs minimising the Markov distance to `model` over all singleton
/// triples, one per Markov equivalence class.
pub fn mmd_dag(model: &IndependenceModel) -> Result<Mmd<Dag>> {
    let u = model.universe();
    let n = u.len();
    if n > DAG_CAP {
        return Err(Error::CapExceeded {
            what: "DAG decoding",
            size: n,
            cap: DAG_CAP,
        });
    }
    let cb = Codebook::get(n, GraphClass::Dags)?;
    let s: TripleSet = cb.triples().iter().copied().collect();
    let obs = observed(model, &s)?;
    let care = cb.mask(cb.triples());
    let value = cb.mask(obs.iter().filter(|o| o.1).map(|o| &o.0));
    let scored: Vec<(usize, Vec<(usize, usize)>, usize)> = (0..cb.len())
        .into_par_iter()
        .map(|g| {
            let d = cb.distance(g, &care, &value) as usize;
            (d, cb.graph(g, u).edges(), g)
        })
        .collect();
    let (distance, runner_up, ids) = split(scored);
    let mut minimizers: Vec<Dag> = Vec::new();
    for g in ids {
        let dag = cb.graph(g, u).as_dag().expect("directed codebook").clone();
        if !minimizers.iter().any(|m| m.markov_equivalent(&dag)) {
            minimizers.push(dag);
        }
    }
    Ok(Mmd {
        minimizers,
        distance,
        runner_up,
    })
}
