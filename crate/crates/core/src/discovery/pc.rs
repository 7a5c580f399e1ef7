//! A minimal PC: skeleton search, collider orientation and Meek's first rule.

use std::collections::BTreeMap;

use super::DiscoveryReport;
use crate::cimodel::{CiStatement, CiTriple, VarSet, VariableUniverse};
use crate::citest::CiOracle;
use crate::error::Result;
use crate::graphs::{Dag, Graph};

/// Partially directed graph. Each adjacency is either directed or undirected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pdag {
    universe: VariableUniverse,
    parents: Vec<VarSet>,
    undirected: Vec<VarSet>,
}

impl Pdag {
    fn complete(universe: VariableUniverse) -> Self {
        let n = universe.len();
        let all = universe.all();
        Pdag {
            universe,
            parents: vec![VarSet::EMPTY; n],
            undirected: (0..n).map(|v| all.without(v)).collect(),
        }
    }

    pub fn universe(&self) -> &VariableUniverse {
        &self.universe
    }

    pub fn n(&self) -> usize {
        self.parents.len()
    }

    fn children(&self, v: usize) -> VarSet {
        (0..self.n()).filter(|&w| self.parents[w].contains(v)).collect()
    }

    pub fn neighbours(&self, v: usize) -> VarSet {
        self.parents[v].union(self.children(v)).union(self.undirected[v])
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.neighbours(a).contains(b)
    }

    /// Whether the edge `a -> b` is present.
    pub fn has_directed(&self, a: usize, b: usize) -> bool {
        self.parents[b].contains(a)
    }

    pub fn has_undirected(&self, a: usize, b: usize) -> bool {
        self.undirected[a].contains(b)
    }

    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = (0..self.n())
            .flat_map(|h| self.parents[h].iter().map(move |t| (t, h)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .flat_map(|a| self.undirected[a].iter().filter(move |&b| b > a).map(move |b| (a, b)))
            .collect()
    }

    fn remove(&mut self, a: usize, b: usize) {
        self.undirected[a] = self.undirected[a].without(b);
        self.undirected[b] = self.undirected[b].without(a);
        self.parents[a] = self.parents[a].without(b);
        self.parents[b] = self.parents[b].without(a);
    }

    /// Turns an undirected `a - b` into `a -> b`. Returns false if the
    /// adjacency is not undirected.
    fn orient(&mut self, a: usize, b: usize) -> bool {
        if !self.has_undirected(a, b) {
            return false;
        }
        self.undirected[a] = self.undirected[a].without(b);
        self.undirected[b] = self.undirected[b].without(a);
        self.parents[b] = self.parents[b].with(a);
        true
    }

    /// A DAG with the same skeleton and v-structures that keeps every
    /// directed edge, if one exists (Dor and Tarsi's sink elimination).
    pub fn extension(&self) -> Option<Dag> {
        let n = self.n();
        let mut parents = self.parents.clone();
        let mut und = self.undirected.clone();
        let mut left = self.universe.all();
        while !left.is_empty() {
            let nb = |v: usize, parents: &[VarSet], und: &[VarSet]| {
                let ch: VarSet = left.iter().filter(|&w| parents[w].contains(v)).collect();
                parents[v].union(ch).union(und[v]).intersection(left)
            };
            let sink = left.iter().find(|&x| {
                let has_child = left.iter().any(|w| parents[w].contains(x));
                !has_child
                    && und[x].intersection(left).iter().all(|y| {
                        let others = nb(x, &parents, &und).without(y);
                        others.is_subset(nb(y, &parents, &und).with(y))
                    })
            })?;
            for y in und[sink].intersection(left).iter() {
                parents[sink] = parents[sink].with(y);
                und[y] = und[y].without(sink);
            }
            und[sink] = VarSet::EMPTY;
            left = left.without(sink);
        }
        debug_assert_eq!(parents.len(), n);
        Dag::from_parents(self.universe.clone(), parents).ok()
    }

    /// Some DAG over the skeleton: the consistent extension when it exists,
    /// otherwise directed edges are kept where they do not close a cycle and
    /// the remaining adjacencies point from lower to higher index when
    /// possible.
    pub fn representative_dag(&self) -> Dag {
        if let Some(d) = self.extension() {
            return d;
        }
        let mut d = Dag::empty(self.universe.clone());
        let undirected = self.undirected_edges();
        let directed = self.directed_edges();
        for (a, b) in directed.into_iter().chain(undirected) {
            d = d
                .add_edge(a, b)
                .or_else(|_| d.add_edge(b, a))
                .expect("one orientation of a new edge is acyclic");
        }
        d
    }
}

/// Output of [`pc_lite`].
#[derive(Clone, Debug, PartialEq)]
pub struct PcResult {
    pub pdag: Pdag,
    /// Separating set of every removed adjacency, keyed by `(a, b)` with `a < b`.
    pub sepsets: BTreeMap<(usize, usize), VarSet>,
    /// Dependences among the conducted tests that the output separates.
    pub non_markovian: Vec<CiStatement>,
    pub report: DiscoveryReport,
}

/// PC with first-found separating sets, first-wins collider orientation and
/// repeated application of Meek's rule R1.
///
/// Skeleton search is the original (order-dependent) variant: adjacencies
/// are updated immediately. Unshielded triples are visited by middle node,
/// then by endpoint pair; an edge oriented by an earlier collider is never
/// reversed. Non-Markovianity is judged on a DAG extension of the output.
pub fn pc_lite(oracle: &mut CiOracle) -> Result<PcResult> {
    let u = oracle.universe().clone();
    let n = u.len();
    let start = oracle.log().len();
    let mut g = Pdag::complete(u);
    let mut sepsets = BTreeMap::new();

    let mut depth = 0;
    loop {
        let mut more = false;
        for x in 0..n {
            for y in 0..n {
                if x == y || !g.adjacent(x, y) {
                    continue;
                }
                let cand = g.neighbours(x).without(y);
                if cand.len() < depth {
                    continue;
                }
                more = true;
                for s in cand.subsets().filter(|s| s.len() == depth) {
                    if oracle.test(&CiTriple::singleton(x, y, s)?)?.0.is_independent() {
                        g.remove(x, y);
                        sepsets.insert((x.min(y), x.max(y)), s);
                        break;
                    }
                }
            }
        }
        if !more {
            break;
        }
        depth += 1;
    }

    for b in 0..n {
        let nb = g.neighbours(b);
        for a in nb.iter() {
            for c in nb.iter().filter(|&c| c > a) {
                if g.adjacent(a, c) {
                    continue;
                }
                let sep = sepsets.get(&(a, c)).copied().unwrap_or(VarSet::EMPTY);
                if !sep.contains(b) {
                    g.orient(a, b);
                    g.orient(c, b);
                }
            }
        }
    }

    loop {
        let mut changed = false;
        for b in 0..n {
            for a in g.parents[b].iter() {
                for c in g.undirected[b].iter() {
                    if !g.adjacent(a, c) && g.orient(b, c) {
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let report = DiscoveryReport::since(oracle, start);
    let dag: Graph = g.representative_dag().into();
    let non_markovian = report
        .conducted
        .iter()
        .filter(|s| !s.verdict.is_independent() && dag.separates_triple(&s.triple))
        .copied()
        .collect();
    Ok(PcResult {
        pdag: g,
        sepsets,
        non_markovian,
        report,
    })
}
