//! Enumeration oracle for graphical redundancy.
//!
//! For small classes the implied singleton model of every graph is
//! precomputed once as a bit row ("codebook"); statement sets then become
//! mask comparisons.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::cimodel::{all_triples, CiStatement, CiTriple, VarSet, VariableUniverse};
use crate::error::{Error, Result};
use crate::graphs::{
    dag_parent_sets, enumerate_graphs, tree_edge_lists, undirected_adjacencies, Dag, Graph,
    GraphClass, UndirectedGraph,
};

/// Largest universes for which codebooks are built.
pub fn codebook_cap(class: GraphClass) -> usize {
    match class {
        GraphClass::Dags => 5,
        GraphClass::UndirectedGraphs => 6,
        GraphClass::SpanningTrees => 7,
    }
}

#[derive(Clone, Debug)]
enum Structure {
    Parents(Vec<VarSet>),
    Adjacency(Vec<VarSet>),
}

/// Implied singleton models of every graph in a class over `n` nodes.
#[derive(Debug)]
pub struct Codebook {
    n: usize,
    class: GraphClass,
    triples: Vec<CiTriple>,
    index: HashMap<CiTriple, usize>,
    words: usize,
    rows: Vec<u64>,
    graphs: Vec<Structure>,
}

impl Codebook {
    /// Shared codebook for `(n, class)`, built on first use.
    pub fn get(n: usize, class: GraphClass) -> Result<Arc<Codebook>> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, GraphClass), Arc<Codebook>>>> = OnceLock::new();
        if n == 0 || n > codebook_cap(class) {
            return Err(Error::CapExceeded {
                what: "codebook",
                size: n,
                cap: codebook_cap(class),
            });
        }
        let cache = CACHE.get_or_init(Default::default);
        if let Some(cb) = cache.lock().expect("codebook cache").get(&(n, class)) {
            return Ok(cb.clone());
        }
        let cb = Arc::new(Self::build(n, class)?);
        cache
            .lock()
            .expect("codebook cache")
            .entry((n, class))
            .or_insert(cb.clone());
        Ok(cb)
    }

    fn build(n: usize, class: GraphClass) -> Result<Self> {
        let universe = VariableUniverse::numbered("V", n)?;
        let triples = all_triples(&universe, true, None)?.to_vec();
        let index = triples.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let words = triples.len().div_ceil(64).max(1);
        let graphs: Vec<Structure> = match class {
            GraphClass::Dags => dag_parent_sets(n).map(Structure::Parents).collect(),
            GraphClass::UndirectedGraphs => undirected_adjacencies(n).map(Structure::Adjacency).collect(),
            GraphClass::SpanningTrees => tree_edge_lists(n)
                .map(|edges| {
                    let mut adj = vec![VarSet::EMPTY; n];
                    for (a, b) in edges {
                        adj[a] = adj[a].with(b);
                        adj[b] = adj[b].with(a);
                    }
                    Structure::Adjacency(adj)
                })
                .collect(),
        };
        let rows: Vec<u64> = graphs
            .par_iter()
            .flat_map_iter(|s| {
                let g = materialize(&universe, s);
                let mut row = vec![0u64; words];
                for (i, t) in triples.iter().enumerate() {
                    if g.separates_triple(t) {
                        row[i / 64] |= 1 << (i % 64);
                    }
                }
                row
            })
            .collect();
        Ok(Codebook {
            n,
            class,
            triples,
            index,
            words,
            rows,
            graphs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn class(&self) -> GraphClass {
        self.class
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// The singleton triples, in bit order.
    pub fn triples(&self) -> &[CiTriple] {
        &self.triples
    }

    pub fn triple_index(&self, t: &CiTriple) -> Option<usize> {
        self.index.get(&t.canonicalize()).copied()
    }

    pub fn row(&self, g: usize) -> &[u64] {
        &self.rows[g * self.words..(g + 1) * self.words]
    }

    /// Whether graph `g` separates the triple with bit index `i`.
    pub fn separates(&self, g: usize, i: usize) -> bool {
        self.rows[g * self.words + i / 64] >> (i % 64) & 1 == 1
    }

    pub fn graph(&self, g: usize, universe: &VariableUniverse) -> Graph {
        materialize(universe, &self.graphs[g])
    }

    /// Bit mask over the codebook triples.
    pub fn mask<'a, I: IntoIterator<Item = &'a CiTriple>>(&self, triples: I) -> Vec<u64> {
        let mut m = vec![0u64; self.words];
        for t in triples {
            if let Some(i) = self.triple_index(t) {
                m[i / 64] |= 1 << (i % 64);
            }
        }
        m
    }

    /// Number of positions in `care` where graph `g` separates differently
    /// from `value`.
    pub fn distance(&self, g: usize, care: &[u64], value: &[u64]) -> u32 {
        self.row(g)
            .iter()
            .zip(care.iter().zip(value))
            .map(|(r, (c, v))| ((r ^ v) & c).count_ones())
            .sum()
    }
}

fn materialize(universe: &VariableUniverse, s: &Structure) -> Graph {
    match s {
        Structure::Parents(p) => Dag::from_parents(universe.clone(), p.clone())
            .expect("enumerated DAG")
            .into(),
        Structure::Adjacency(a) => {
            let edges: Vec<(usize, usize)> = a
                .iter()
                .enumerate()
                .flat_map(|(x, nb)| nb.iter().filter(move |&y| y > x).map(move |y| (x, y)))
                .collect();
            UndirectedGraph::new(universe.clone(), &edges)
                .expect("enumerated graph")
                .into()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphicalRedundancy {
    /// Every graph consistent with the statements agrees with the target.
    Redundant,
    /// A consistent graph disagreeing with the target.
    NotRedundant(Graph),
    /// No graph of the class is consistent with the statements.
    Vacuous,
}

impl GraphicalRedundancy {
    pub fn is_redundant(&self) -> bool {
        matches!(self, GraphicalRedundancy::Redundant)
    }
}

enum Backing {
    Codebook {
        book: Arc<Codebook>,
        consistent: Vec<usize>,
    },
    Stream {
        graphs: Vec<Graph>,
    },
}

/// The graphs of a class whose implied model matches a statement list.
pub struct ConsistentGraphs {
    universe: VariableUniverse,
    backing: Backing,
}

fn matches_all(g: &Graph, l: &[CiStatement]) -> bool {
    l.iter().all(|s| g.verdict(&s.triple) == s.verdict)
}

impl ConsistentGraphs {
    pub fn new(universe: &VariableUniverse, l: &[CiStatement], class: GraphClass) -> Result<Self> {
        let n = universe.len();
        if n > class.cap() {
            return Err(Error::CapExceeded {
                what: "graph enumeration",
                size: n,
                cap: class.cap(),
            });
        }
        let backing = if n <= codebook_cap(class) {
            let book = Codebook::get(n, class)?;
            let (singles, others): (Vec<&CiStatement>, Vec<&CiStatement>) =
                l.iter().partition(|s| s.triple.is_singleton());
            let care = book.mask(singles.iter().map(|s| &s.triple));
            let value = book.mask(
                singles
                    .iter()
                    .filter(|s| s.verdict.is_independent())
                    .map(|s| &s.triple),
            );
            // A singleton triple stated both ways can never match.
            let clash = singles.iter().any(|a| {
                singles
                    .iter()
                    .any(|b| a.triple == b.triple && a.verdict != b.verdict)
            });
            let consistent = if clash {
                Vec::new()
            } else {
                (0..book.len())
                    .filter(|&g| book.distance(g, &care, &value) == 0)
                    .filter(|&g| {
                        others.is_empty() || {
                            let graph = book.graph(g, universe);
                            others.iter().all(|s| graph.verdict(&s.triple) == s.verdict)
                        }
                    })
                    .collect()
            };
            Backing::Codebook { book, consistent }
        } else {
            let graphs = enumerate_graphs(universe, class)?
                .filter(|g| matches_all(g, l))
                .collect();
            Backing::Stream { graphs }
        };
        Ok(ConsistentGraphs {
            universe: universe.clone(),
            backing,
        })
    }

    pub fn len(&self) -> usize {
        match &self.backing {
            Backing::Codebook { consistent, .. } => consistent.len(),
            Backing::Stream { graphs } => graphs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn graphs(&self) -> Vec<Graph> {
        match &self.backing {
            Backing::Codebook { book, consistent } => consistent
                .iter()
                .map(|&g| book.graph(g, &self.universe))
                .collect(),
            Backing::Stream { graphs } => graphs.clone(),
        }
    }

    /// Whether all consistent graphs agree with `s`.
    pub fn redundancy(&self, s: &CiStatement) -> GraphicalRedundancy {
        if self.is_empty() {
            return GraphicalRedundancy::Vacuous;
        }
        let want = s.verdict.is_independent();
        let witness = match &self.backing {
            Backing::Codebook { book, consistent } => match book.triple_index(&s.triple) {
                Some(i) => consistent
                    .iter()
                    .find(|&&g| book.separates(g, i) != want)
                    .map(|&g| book.graph(g, &self.universe)),
                None => consistent
                    .iter()
                    .map(|&g| book.graph(g, &self.universe))
                    .find(|g| g.separates_triple(&s.triple) != want),
            },
            Backing::Stream { graphs } => graphs
                .iter()
                .find(|g| g.separates_triple(&s.triple) != want)
                .cloned(),
        };
        match witness {
            Some(g) => GraphicalRedundancy::NotRedundant(g),
            None => GraphicalRedundancy::Redundant,
        }
    }
}

/// Enumerates the class and checks whether every graph matching `l` also
/// matches `s`.
pub fn is_graphically_redundant(
    universe: &VariableUniverse,
    l: &[CiStatement],
    s: &CiStatement,
    class: GraphClass,
) -> Result<GraphicalRedundancy> {
    Ok(ConsistentGraphs::new(universe, l, class)?.redundancy(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cimodel::Verdict;

    #[test]
    fn codebook_sizes() {
        assert_eq!(Codebook::get(3, GraphClass::Dags).unwrap().len(), 25);
        assert_eq!(Codebook::get(4, GraphClass::SpanningTrees).unwrap().len(), 16);
        let ug = Codebook::get(3, GraphClass::UndirectedGraphs).unwrap();
        assert_eq!(ug.len(), 8);
        assert_eq!(ug.triples().len(), 6);
    }

    #[test]
    fn empty_list_is_not_redundant() {
        let u = VariableUniverse::numbered("X", 3).unwrap();
        let s = CiStatement::new(CiTriple::singleton(0, 1, VarSet::EMPTY).unwrap(), Verdict::Dependent);
        let r = is_graphically_redundant(&u, &[], &s, GraphClass::Dags).unwrap();
        assert!(matches!(r, GraphicalRedundancy::NotRedundant(_)));
    }

    #[test]
    fn clash_is_vacuous() {
        let u = VariableUniverse::numbered("X", 3).unwrap();
        let t = CiTriple::singleton(0, 1, VarSet::EMPTY).unwrap();
        let l = [CiStatement::indep(t), CiStatement::dep(t)];
        let s = CiStatement::dep(CiTriple::singleton(0, 2, VarSet::EMPTY).unwrap());
        assert_eq!(
            is_graphically_redundant(&u, &l, &s, GraphClass::Dags).unwrap(),
            GraphicalRedundancy::Vacuous
        );
    }
}
