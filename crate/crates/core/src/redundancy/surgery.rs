//! Node-splitting surgery that separates a connected pair while keeping the
//! rest of the graph's separations.
//!
//! Every node on an active path between the two sides is replaced by two
//! copies. Copies of the first kind keep their edges to the `x` side only,
//! copies of the second kind to the `y` side only, and nodes off those paths
//! connect to both. Direct edges between the sides are dropped. A node that
//! has been copied stands for the set of its copies in all later queries.

use crate::cimodel::{CiStatement, CiTriple, VarSet, Verdict, VariableUniverse};
use crate::error::{Error, Result};
use crate::graphs::{search_paths, Dag, Graph, UndirectedGraph};

/// Splitting rounds before giving up. One round suffices unless a copy
/// opens a collider elsewhere.
const MAX_ROUNDS: usize = 8;

/// A graph over copies of the original nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryGraph {
    original: VariableUniverse,
    graph: Graph,
    images: Vec<VarSet>,
}

impl SurgeryGraph {
    /// The graph itself, every node its own image.
    pub fn identity(g: &Graph) -> Self {
        SurgeryGraph {
            original: g.universe().clone(),
            graph: g.clone(),
            images: (0..g.n()).map(VarSet::singleton).collect(),
        }
    }

    pub fn original(&self) -> &VariableUniverse {
        &self.original
    }

    /// The graph over the expanded node set.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Nodes standing for original node `v`.
    pub fn copies(&self, v: usize) -> VarSet {
        self.images[v]
    }

    pub fn image(&self, s: VarSet) -> VarSet {
        s.iter().fold(VarSet::EMPTY, |acc, v| acc.union(self.images[v]))
    }

    pub fn map_triple(&self, t: &CiTriple) -> CiTriple {
        CiTriple::new_unchecked(self.image(t.x), self.image(t.y), self.image(t.z))
    }

    pub fn separates(&self, t: &CiTriple) -> bool {
        self.graph.separates_triple(&self.map_triple(t))
    }

    pub fn verdict(&self, t: &CiTriple) -> Verdict {
        Verdict::from_independent(self.separates(t))
    }

    /// Whether every independence in `l` is a separation here.
    pub fn is_markovian_to(&self, l: &[CiStatement]) -> bool {
        l.iter()
            .filter(|s| s.verdict.is_independent())
            .all(|s| self.separates(&s.triple))
    }

    /// Whether any copy was made.
    pub fn is_split(&self) -> bool {
        self.images.iter().any(|i| i.len() > 1)
    }

    /// Splits the graph so that `s.x` and `s.y` become separated given `s.z`.
    pub fn surgery(&self, s: &CiTriple) -> Result<SurgeryGraph> {
        if self.separates(s) {
            return Err(Error::Precondition(format!(
                "{} is already separated",
                self.original.fmt_triple(s)
            )));
        }
        let mut cur = self.clone();
        for _ in 0..MAX_ROUNDS {
            cur = cur.split_once(s)?;
            if cur.separates(s) {
                return Ok(cur);
            }
        }
        Err(Error::Precondition(format!(
            "surgery did not separate {} within {MAX_ROUNDS} rounds",
            self.original.fmt_triple(s)
        )))
    }

    fn split_once(&self, s: &CiTriple) -> Result<SurgeryGraph> {
        let t = self.map_triple(s);
        let (x, y, z) = (t.x, t.y, t.z);
        let g = &self.graph;
        let on_paths = nodes_on_active_paths(g, x, y, z);
        let u = g.universe();
        let size = u.len() + on_paths.len();
        if size > 64 {
            return Err(Error::CapExceeded {
                what: "surgery graph",
                size,
                cap: 64,
            });
        }

        let mut names: Vec<String> = Vec::with_capacity(size);
        let mut first = vec![0usize; u.len()];
        let mut second = vec![0usize; u.len()];
        let taken: std::collections::HashSet<&str> = u.names().iter().map(|s| s.as_str()).collect();
        for v in 0..u.len() {
            if on_paths.contains(v) {
                for (k, slot) in [(1, &mut first), (2, &mut second)] {
                    let mut name = format!("{}#{k}", u.name(v));
                    while taken.contains(name.as_str()) || names.contains(&name) {
                        name.push('#');
                    }
                    slot[v] = names.len();
                    names.push(name);
                }
            } else {
                first[v] = names.len();
                second[v] = names.len();
                names.push(u.name(v).to_string());
            }
        }

        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (a, b) in g.edges() {
            if (x.contains(a) && y.contains(b)) || (y.contains(a) && x.contains(b)) {
                continue;
            }
            let (na, nb) = (on_paths.contains(a), on_paths.contains(b));
            match (na, nb) {
                (true, true) => {
                    edges.push((first[a], first[b]));
                    edges.push((second[a], second[b]));
                }
                (true, false) | (false, true) => {
                    let (inner, outer) = if na { (a, b) } else { (b, a) };
                    let o = first[outer];
                    let mut push = |c: usize| {
                        edges.push(if na { (c, o) } else { (o, c) });
                    };
                    if x.contains(outer) {
                        push(first[inner]);
                    } else if y.contains(outer) {
                        push(second[inner]);
                    } else {
                        push(first[inner]);
                        push(second[inner]);
                    }
                }
                (false, false) => edges.push((first[a], first[b])),
            }
        }

        let nu = VariableUniverse::new(&names)?;
        let graph: Graph = if g.is_directed() {
            Dag::new(nu, &edges)?.into()
        } else {
            UndirectedGraph::new(nu, &edges)?.into()
        };
        let images = self
            .images
            .iter()
            .map(|img| {
                img.iter()
                    .fold(VarSet::EMPTY, |acc, v| acc.with(first[v]).with(second[v]))
            })
            .collect();
        Ok(SurgeryGraph {
            original: self.original.clone(),
            graph,
            images,
        })
    }
}

/// Interior nodes of simple paths between `x` and `y` that are active given
/// `z` and do not pass through `x ∪ y`.
pub fn nodes_on_active_paths(g: &Graph, x: VarSet, y: VarSet, z: VarSet) -> VarSet {
    let an_z = g.ancestral_closure(z);
    let ends = x.union(y);
    let mut out = VarSet::EMPTY;
    for a in x.iter() {
        for b in y.iter() {
            search_paths(
                g,
                a,
                b,
                |p| {
                    let k = p.len();
                    let w = p[k - 1];
                    if w != b && ends.contains(w) {
                        return false;
                    }
                    if k < 3 {
                        return true;
                    }
                    let (prev, v, next) = (p[k - 3], p[k - 2], p[k - 1]);
                    if g.is_collider(prev, v, next) {
                        an_z.contains(v)
                    } else {
                        !z.contains(v)
                    }
                },
                |p| {
                    for &v in &p[1..p.len() - 1] {
                        out = out.with(v);
                    }
                    false
                },
            );
        }
    }
    out
}

/// Surgery on a plain graph.
pub fn graph_surgery(g: &Graph, s: &CiTriple) -> Result<SurgeryGraph> {
    SurgeryGraph::identity(g).surgery(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_edge_is_dropped() {
        let u = VariableUniverse::new(&["X", "Y"]).unwrap();
        let g: Graph = UndirectedGraph::new(u.clone(), &[(0, 1)]).unwrap().into();
        let s = u.triple(&["X"], &["Y"], &[] as &[&str]).unwrap();
        let r = graph_surgery(&g, &s).unwrap();
        assert_eq!(r.graph().edge_count(), 0);
        assert!(!r.is_split());
    }

    #[test]
    fn path_is_split_into_two_halves() {
        let u = VariableUniverse::new(&["X", "V", "W", "Y"]).unwrap();
        let g: Graph = UndirectedGraph::chain(u.clone()).into();
        let s = u.triple(&["X"], &["Y"], &[] as &[&str]).unwrap();
        let r = graph_surgery(&g, &s).unwrap();
        let names = r.graph().universe().names().to_vec();
        assert_eq!(names, ["X", "V#1", "V#2", "W#1", "W#2", "Y"]);
        let edges: Vec<(String, String)> = r
            .graph()
            .edges()
            .into_iter()
            .map(|(a, b)| (names[a].clone(), names[b].clone()))
            .collect();
        let want = [("X", "V#1"), ("V#1", "W#1"), ("V#2", "W#2"), ("W#2", "Y")];
        assert_eq!(edges.len(), want.len());
        for (a, b) in want {
            assert!(edges.contains(&(a.to_string(), b.to_string())), "{a}-{b}");
        }
        assert_eq!(r.copies(1).len(), 2);
    }

    #[test]
    fn collider_is_split() {
        let u = VariableUniverse::new(&["X1", "X2", "Y"]).unwrap();
        let g: Graph = Dag::new(u.clone(), &[(0, 2), (1, 2)]).unwrap().into();
        let s = u.triple(&["X1"], &["X2"], &["Y"]).unwrap();
        let r = graph_surgery(&g, &s).unwrap();
        assert!(r.separates(&s));
        assert_eq!(r.graph().n(), 4);
        // Marginal independence survives.
        assert!(r.separates(&u.triple(&["X1"], &["X2"], &[] as &[&str]).unwrap()));
        assert!(!r.separates(&u.triple(&["X1"], &["Y"], &[] as &[&str]).unwrap()));
    }

    #[test]
    fn collider_opened_by_copy_needs_second_round() {
        // X -> W -> Y, W -> U, conditioning on U.
        let u = VariableUniverse::new(&["X", "W", "Y", "U"]).unwrap();
        let g: Graph = Dag::new(u.clone(), &[(0, 1), (1, 2), (1, 3)]).unwrap().into();
        let s = u.triple(&["X"], &["Y"], &["U"]).unwrap();
        let r = graph_surgery(&g, &s).unwrap();
        assert!(r.separates(&s));
    }

    #[test]
    fn separated_pair_is_rejected() {
        let u = VariableUniverse::new(&["X", "Y"]).unwrap();
        let g: Graph = UndirectedGraph::empty(u.clone()).into();
        let s = u.triple(&["X"], &["Y"], &[] as &[&str]).unwrap();
        assert!(matches!(graph_surgery(&g, &s), Err(Error::Precondition(_))));
    }
}
