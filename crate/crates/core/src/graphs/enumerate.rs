use crate::cimodel::{VarSet, VariableUniverse};
use crate::error::{Error, Result};

use super::dag::is_acyclic;
use super::{Dag, Graph, GraphClass, UndirectedGraph};

pub const DAG_CAP: usize = 5;
pub const UNDIRECTED_CAP: usize = 6;
pub const TREE_CAP: usize = 9;

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect()
}

/// Parent-set vectors of every labelled DAG on `n` nodes.
///
/// Each unordered pair is absent, forward or backward; cyclic choices are
/// discarded.
pub fn dag_parent_sets(n: usize) -> impl Iterator<Item = Vec<VarSet>> {
    let pairs = pairs(n);
    let total = 3u64.pow(pairs.len() as u32);
    (0..total).filter_map(move |mut code| {
        let mut parents = vec![VarSet::EMPTY; n];
        for &(a, b) in &pairs {
            match code % 3 {
                1 => parents[b] = parents[b].with(a),
                2 => parents[a] = parents[a].with(b),
                _ => {}
            }
            code /= 3;
        }
        is_acyclic(&parents).then_some(parents)
    })
}

/// Adjacency vectors of every labelled undirected graph on `n` nodes.
pub fn undirected_adjacencies(n: usize) -> impl Iterator<Item = Vec<VarSet>> {
    let pairs = pairs(n);
    let total = 1u64 << pairs.len();
    (0..total).map(move |code| {
        let mut adj = vec![VarSet::EMPTY; n];
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if code >> i & 1 == 1 {
                adj[a] = adj[a].with(b);
                adj[b] = adj[b].with(a);
            }
        }
        adj
    })
}

/// Decodes a Prüfer sequence over `0..n` (length `n - 2`) into tree edges.
pub fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for &v in seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a leaf always exists");
        edges.push((leaf.min(v), leaf.max(v)));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    if let [a, b] = rest[..] {
        edges.push((a, b));
    }
    edges.sort_unstable();
    edges
}

/// Edge lists of every labelled spanning tree on `n` nodes, one per Prüfer
/// sequence.
pub fn tree_edge_lists(n: usize) -> impl Iterator<Item = Vec<(usize, usize)>> {
    let len = n.saturating_sub(2);
    let total = if n < 2 { 1 } else { (n as u64).pow(len as u32) };
    (0..total).map(move |mut code| {
        let mut seq = vec![0usize; len];
        for s in seq.iter_mut() {
            *s = (code % n as u64) as usize;
            code /= n as u64;
        }
        prufer_decode(&seq, n)
    })
}

impl GraphClass {
    pub fn cap(self) -> usize {
        match self {
            GraphClass::Dags => DAG_CAP,
            GraphClass::UndirectedGraphs => UNDIRECTED_CAP,
            GraphClass::SpanningTrees => TREE_CAP,
        }
    }
}

/// Every graph of `class` over `universe`, each exactly once.
pub fn enumerate_graphs(
    universe: &VariableUniverse,
    class: GraphClass,
) -> Result<Box<dyn Iterator<Item = Graph> + Send>> {
    let n = universe.len();
    if n > class.cap() {
        return Err(Error::CapExceeded {
            what: "graph enumeration",
            size: n,
            cap: class.cap(),
        });
    }
    let u = universe.clone();
    Ok(match class {
        GraphClass::Dags => Box::new(dag_parent_sets(n).map(move |p| {
            Graph::Directed(Dag::from_parents(u.clone(), p).expect("enumerated DAG is valid"))
        })),
        GraphClass::UndirectedGraphs => Box::new(undirected_adjacencies(n).map(move |adj| {
            Graph::Undirected(UndirectedGraph::from_adjacency_unchecked(u.clone(), adj))
        })),
        GraphClass::SpanningTrees => Box::new(tree_edge_lists(n).map(move |e| {
            Graph::Undirected(UndirectedGraph::new(u.clone(), &e).expect("decoded tree is valid"))
        })),
    })
}
