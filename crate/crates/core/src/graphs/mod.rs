//! DAGs and undirected graphs, (d-)separation, the coupling predicates and
//! exhaustive enumeration of graph classes.

mod dag;
mod enumerate;
mod paths;
mod ugraph;

use serde::{Deserialize, Serialize};

pub use dag::Dag;
pub use enumerate::{
    dag_parent_sets, enumerate_graphs, prufer_decode, tree_edge_lists, undirected_adjacencies,
    DAG_CAP, TREE_CAP, UNDIRECTED_CAP,
};
pub use paths::{active_paths, coupled_over, path_active, s_active_path_exists, PATH_PREDICATE_CAP};
pub use ugraph::UndirectedGraph;

pub(crate) use paths::search_paths;

use crate::cimodel::{CiTriple, IndependenceModel, TripleSet, VarSet, Verdict, VariableUniverse};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphClass {
    Dags,
    UndirectedGraphs,
    SpanningTrees,
}

/// Either kind of graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Graph {
    Directed(Dag),
    Undirected(UndirectedGraph),
}

impl From<Dag> for Graph {
    fn from(g: Dag) -> Self {
        Graph::Directed(g)
    }
}

impl From<UndirectedGraph> for Graph {
    fn from(g: UndirectedGraph) -> Self {
        Graph::Undirected(g)
    }
}

impl Graph {
    pub fn universe(&self) -> &VariableUniverse {
        match self {
            Graph::Directed(g) => g.universe(),
            Graph::Undirected(g) => g.universe(),
        }
    }

    pub fn n(&self) -> usize {
        self.universe().len()
    }

    pub fn is_directed(&self) -> bool {
        matches!(self, Graph::Directed(_))
    }

    pub fn as_dag(&self) -> Option<&Dag> {
        match self {
            Graph::Directed(g) => Some(g),
            Graph::Undirected(_) => None,
        }
    }

    pub fn as_undirected(&self) -> Option<&UndirectedGraph> {
        match self {
            Graph::Undirected(g) => Some(g),
            Graph::Directed(_) => None,
        }
    }

    pub fn neighbours(&self, v: usize) -> VarSet {
        match self {
            Graph::Directed(g) => g.neighbours(v),
            Graph::Undirected(g) => g.neighbours(v),
        }
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.neighbours(a).contains(b)
    }

    pub fn edge_count(&self) -> usize {
        match self {
            Graph::Directed(g) => g.edge_count(),
            Graph::Undirected(g) => g.edge_count(),
        }
    }

    /// Edges as pairs; `(tail, head)` for DAGs, `(a, b)` with `a < b` otherwise.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        match self {
            Graph::Directed(g) => g.edges(),
            Graph::Undirected(g) => g.edges(),
        }
    }

    pub fn skeleton(&self) -> UndirectedGraph {
        match self {
            Graph::Directed(g) => g.skeleton(),
            Graph::Undirected(g) => g.clone(),
        }
    }

    /// Removes the edge between `a` and `b` (as `a -> b` for DAGs).
    pub fn remove_edge(&self, a: usize, b: usize) -> Result<Graph> {
        Ok(match self {
            Graph::Directed(g) => g.remove_edge(a, b)?.into(),
            Graph::Undirected(g) => g.remove_edge(a, b)?.into(),
        })
    }

    /// Both edges point into `v`. Always false for undirected graphs.
    pub fn is_collider(&self, a: usize, v: usize, b: usize) -> bool {
        match self {
            Graph::Directed(g) => g.has_edge(a, v) && g.has_edge(b, v),
            Graph::Undirected(_) => false,
        }
    }

    /// Ancestral closure for DAGs; the set itself for undirected graphs.
    pub fn ancestral_closure(&self, set: VarSet) -> VarSet {
        match self {
            Graph::Directed(g) => g.ancestral_closure(set),
            Graph::Undirected(_) => set,
        }
    }

    /// (d-)separation without input validation.
    pub fn separates(&self, x: VarSet, y: VarSet, z: VarSet) -> bool {
        match self {
            Graph::Directed(g) => g.d_separates(x, y, z),
            Graph::Undirected(g) => g.separates(x, y, z),
        }
    }

    pub fn separates_triple(&self, t: &CiTriple) -> bool {
        self.separates(t.x, t.y, t.z)
    }

    pub fn verdict(&self, t: &CiTriple) -> Verdict {
        Verdict::from_independent(self.separates_triple(t))
    }

    pub fn is_spanning_tree(&self) -> bool {
        match self {
            Graph::Undirected(g) => g.is_spanning_tree(),
            Graph::Directed(g) => g.skeleton().is_spanning_tree(),
        }
    }

    /// Markov equivalence: equal skeletons, and for DAGs equal unshielded
    /// colliders.
    pub fn markov_equivalent(&self, other: &Graph) -> bool {
        match (self, other) {
            (Graph::Directed(a), Graph::Directed(b)) => a.markov_equivalent(b),
            (Graph::Undirected(a), Graph::Undirected(b)) => a == b,
            _ => false,
        }
    }
}

fn check_sets(x: VarSet, y: VarSet, z: VarSet) -> Result<()> {
    CiTriple::new(x, y, z).map(|_| ())
}

/// Whether every path from `x` to `y` in `g` passes through `z`.
pub fn separated(g: &UndirectedGraph, x: VarSet, y: VarSet, z: VarSet) -> Result<bool> {
    check_sets(x, y, z)?;
    Ok(g.separates(x, y, z))
}

/// Whether `z` d-separates `x` from `y` in `g`.
pub fn d_separated(g: &Dag, x: VarSet, y: VarSet, z: VarSet) -> Result<bool> {
    check_sets(x, y, z)?;
    Ok(g.d_separates(x, y, z))
}

/// The model a graph induces on `s`: independent exactly when separated.
pub fn implied_model(g: &Graph, s: &TripleSet) -> IndependenceModel {
    let mut m = IndependenceModel::new(g.universe().clone());
    for t in s {
        m.set(*t, g.verdict(t));
    }
    m
}

/// Coupling of two nodes given `z`.
///
/// Undirected: `x - y` is an edge and all other neighbours of `x` (or of `y`)
/// lie in `z`. Directed: there is an edge between `x` and `y`, every other
/// parent of its head lies in `z`, and removing the edge leaves `x` and `y`
/// d-separated by `z`.
pub fn coupled(g: &Graph, x: usize, y: usize, z: VarSet) -> bool {
    if x == y || z.contains(x) || z.contains(y) {
        return false;
    }
    let allowed = z.with(x).with(y);
    match g {
        Graph::Undirected(u) => {
            u.adjacent(x, y)
                && (u.neighbours(x).is_subset(allowed) || u.neighbours(y).is_subset(allowed))
        }
        Graph::Directed(d) => {
            let (tail, head) = if d.has_edge(x, y) {
                (x, y)
            } else if d.has_edge(y, x) {
                (y, x)
            } else {
                return false;
            };
            d.parents(head).is_subset(allowed)
                && d.remove_edge(tail, head)
                    .expect("edge present")
                    .d_separates(VarSet::singleton(x), VarSet::singleton(y), z)
        }
    }
}

/// Structural Hamming distance: pairs whose adjacency differs, plus
/// adjacencies with different orientation when both graphs are DAGs.
pub fn shd(a: &Graph, b: &Graph) -> usize {
    let n = a.n();
    let mut d = 0;
    for x in 0..n {
        for y in x + 1..n {
            let (ea, eb) = (a.adjacent(x, y), b.adjacent(x, y));
            if ea != eb {
                d += 1;
            } else if ea {
                if let (Graph::Directed(da), Graph::Directed(db)) = (a, b) {
                    if da.has_edge(x, y) != db.has_edge(x, y) {
                        d += 1;
                    }
                }
            }
        }
    }
    d
}

/// Wire format for graph files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub directed: bool,
}

impl GraphFile {
    pub fn from_graph(g: &Graph) -> Self {
        let u = g.universe();
        GraphFile {
            nodes: u.names().to_vec(),
            edges: g
                .edges()
                .into_iter()
                .map(|(a, b)| (u.name(a).to_string(), u.name(b).to_string()))
                .collect(),
            directed: g.is_directed(),
        }
    }

    pub fn into_graph(self) -> Result<Graph> {
        let u = VariableUniverse::new(&self.nodes)?;
        if self.directed {
            Ok(Dag::from_names(u, &self.edges)?.into())
        } else {
            Ok(UndirectedGraph::from_names(u, &self.edges)?.into())
        }
    }

    /// Reuses an existing universe; node lists must match.
    pub fn into_graph_over(self, universe: &VariableUniverse) -> Result<Graph> {
        if self.nodes != universe.names() {
            return Err(Error::Parse(format!(
                "graph nodes {:?} do not match universe {:?}",
                self.nodes,
                universe.names()
            )));
        }
        if self.directed {
            Ok(Dag::from_names(universe.clone(), &self.edges)?.into())
        } else {
            Ok(UndirectedGraph::from_names(universe.clone(), &self.edges)?.into())
        }
    }
}
