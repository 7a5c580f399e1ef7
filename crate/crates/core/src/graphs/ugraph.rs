use crate::cimodel::{VarSet, VariableUniverse};
use crate::error::{Error, Result};

/// Undirected simple graph stored as adjacency bitmasks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    universe: VariableUniverse,
    adj: Vec<VarSet>,
}

impl UndirectedGraph {
    pub fn new(universe: VariableUniverse, edges: &[(usize, usize)]) -> Result<Self> {
        let n = universe.len();
        let mut adj = vec![VarSet::EMPTY; n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::UnknownVariable(format!("#{}", a.max(b))));
            }
            if a == b {
                return Err(Error::SelfLoop(universe.name(a).to_string()));
            }
            adj[a] = adj[a].with(b);
            adj[b] = adj[b].with(a);
        }
        Ok(UndirectedGraph { universe, adj })
    }

    pub fn from_names<S: AsRef<str>>(universe: VariableUniverse, edges: &[(S, S)]) -> Result<Self> {
        let idx = edges
            .iter()
            .map(|(a, b)| Ok((universe.index(a.as_ref())?, universe.index(b.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(universe, &idx)
    }

    /// Adjacency must be symmetric and loop-free.
    pub(crate) fn from_adjacency_unchecked(universe: VariableUniverse, adj: Vec<VarSet>) -> Self {
        debug_assert!(adj.iter().enumerate().all(|(v, a)| !a.contains(v)
            && a.iter().all(|w| adj[w].contains(v))));
        UndirectedGraph { universe, adj }
    }

    pub fn empty(universe: VariableUniverse) -> Self {
        let n = universe.len();
        UndirectedGraph {
            universe,
            adj: vec![VarSet::EMPTY; n],
        }
    }

    pub fn complete(universe: VariableUniverse) -> Self {
        let all = universe.all();
        let adj = (0..universe.len()).map(|v| all.without(v)).collect();
        UndirectedGraph { universe, adj }
    }

    /// Path `0 - 1 - .. - n-1`.
    pub fn chain(universe: VariableUniverse) -> Self {
        let edges: Vec<(usize, usize)> = (1..universe.len()).map(|i| (i - 1, i)).collect();
        Self::new(universe, &edges).expect("valid chain")
    }

    pub fn universe(&self) -> &VariableUniverse {
        &self.universe
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbours(&self, v: usize) -> VarSet {
        self.adj[v]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, nb) in self.adj.iter().enumerate() {
            for b in nb.iter().filter(|&b| b > a) {
                out.push((a, b));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn add_edge(&self, a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::SelfLoop(self.universe.name(a).to_string()));
        }
        let mut g = self.clone();
        g.adj[a] = g.adj[a].with(b);
        g.adj[b] = g.adj[b].with(a);
        Ok(g)
    }

    pub fn remove_edge(&self, a: usize, b: usize) -> Result<Self> {
        if !self.adjacent(a, b) {
            return Err(Error::EdgeAbsent(format!(
                "{} - {}",
                self.universe.name(a),
                self.universe.name(b)
            )));
        }
        let mut g = self.clone();
        g.adj[a] = g.adj[a].without(b);
        g.adj[b] = g.adj[b].without(a);
        Ok(g)
    }

    /// Nodes reachable from `from` without entering `blocked`.
    pub fn reachable(&self, from: VarSet, blocked: VarSet) -> VarSet {
        let mut seen = from.minus(blocked);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = VarSet::EMPTY;
            for v in frontier.iter() {
                next = next.union(self.adj[v]);
            }
            frontier = next.minus(seen).minus(blocked);
            seen = seen.union(frontier);
        }
        seen
    }

    /// Whether every path from `x` to `y` meets `z`. Sets are assumed valid.
    pub fn separates(&self, x: VarSet, y: VarSet, z: VarSet) -> bool {
        self.reachable(x, z).is_disjoint(y)
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.reachable(VarSet::singleton(0), VarSet::EMPTY) == self.universe.all()
    }

    pub fn is_spanning_tree(&self) -> bool {
        self.is_connected() && self.edge_count() + 1 == self.n()
    }

    /// Orients a tree away from `root`.
    pub fn orient_from(&self, root: usize) -> Result<super::Dag> {
        if !self.is_spanning_tree() {
            return Err(Error::Precondition("graph is not a spanning tree".into()));
        }
        let mut edges = Vec::with_capacity(self.n().saturating_sub(1));
        let mut seen = VarSet::singleton(root);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for w in self.adj[v].minus(seen).iter() {
                seen = seen.with(w);
                edges.push((v, w));
                stack.push(w);
            }
        }
        super::Dag::new(self.universe.clone(), &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_separation() {
        let g = UndirectedGraph::chain(VariableUniverse::numbered("X", 3).unwrap());
        let s = VarSet::singleton;
        assert!(g.separates(s(0), s(2), s(1)));
        assert!(!g.separates(s(0), s(2), VarSet::EMPTY));
        assert!(g.is_spanning_tree());
    }

    #[test]
    fn isolated_nodes_are_separated() {
        let g = UndirectedGraph::empty(VariableUniverse::numbered("X", 2).unwrap());
        assert!(g.separates(VarSet::singleton(0), VarSet::singleton(1), VarSet::EMPTY));
        assert!(!g.is_spanning_tree());
    }

    #[test]
    fn orientation_has_no_colliders() {
        let u = VariableUniverse::numbered("X", 5).unwrap();
        let g = UndirectedGraph::new(u, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let d = g.orient_from(2).unwrap();
        assert!(d.v_structures().is_empty());
        assert_eq!(d.skeleton(), g);
    }
}
