use std::collections::VecDeque;

use crate::cimodel::{VarSet, VariableUniverse};
use crate::error::{Error, Result};

use super::UndirectedGraph;

/// Directed acyclic graph stored as parent and child bitmasks per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    universe: VariableUniverse,
    parents: Vec<VarSet>,
    children: Vec<VarSet>,
}

impl Dag {
    /// Builds a DAG from `(tail, head)` index pairs. Duplicate edges are merged.
    pub fn new(universe: VariableUniverse, edges: &[(usize, usize)]) -> Result<Self> {
        let n = universe.len();
        let mut parents = vec![VarSet::EMPTY; n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::UnknownVariable(format!("#{}", a.max(b))));
            }
            if a == b {
                return Err(Error::SelfLoop(universe.name(a).to_string()));
            }
            parents[b] = parents[b].with(a);
        }
        Self::from_parents(universe, parents)
    }

    /// Builds a DAG from named `(tail, head)` pairs.
    pub fn from_names<S: AsRef<str>>(universe: VariableUniverse, edges: &[(S, S)]) -> Result<Self> {
        let idx = edges
            .iter()
            .map(|(a, b)| Ok((universe.index(a.as_ref())?, universe.index(b.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(universe, &idx)
    }

    pub fn from_parents(universe: VariableUniverse, parents: Vec<VarSet>) -> Result<Self> {
        let n = universe.len();
        if parents.len() != n {
            return Err(Error::Precondition(format!(
                "{} parent sets for {n} variables",
                parents.len()
            )));
        }
        for (i, p) in parents.iter().enumerate() {
            if p.contains(i) {
                return Err(Error::SelfLoop(universe.name(i).to_string()));
            }
            if !p.is_subset(universe.all()) {
                return Err(Error::UnknownVariable(format!("parent of {}", universe.name(i))));
            }
        }
        if !is_acyclic(&parents) {
            return Err(Error::Cycle);
        }
        let mut children = vec![VarSet::EMPTY; n];
        for (b, p) in parents.iter().enumerate() {
            for a in p.iter() {
                children[a] = children[a].with(b);
            }
        }
        Ok(Dag {
            universe,
            parents,
            children,
        })
    }

    /// Graph with no edges.
    pub fn empty(universe: VariableUniverse) -> Self {
        let n = universe.len();
        Dag {
            universe,
            parents: vec![VarSet::EMPTY; n],
            children: vec![VarSet::EMPTY; n],
        }
    }

    /// Complete DAG following the universe order.
    pub fn complete(universe: VariableUniverse) -> Self {
        let parents = (0..universe.len()).map(VarSet::full).collect();
        Self::from_parents(universe, parents).expect("forward edges are acyclic")
    }

    pub fn universe(&self) -> &VariableUniverse {
        &self.universe
    }

    pub fn n(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self, v: usize) -> VarSet {
        self.parents[v]
    }

    pub fn children(&self, v: usize) -> VarSet {
        self.children[v]
    }

    pub fn parent_sets(&self) -> &[VarSet] {
        &self.parents
    }

    pub fn neighbours(&self, v: usize) -> VarSet {
        self.parents[v].union(self.children[v])
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.parents[b].contains(a)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// Edges as `(tail, head)`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .parents
            .iter()
            .enumerate()
            .flat_map(|(b, p)| p.iter().map(move |a| (a, b)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(|p| p.len()).sum()
    }

    pub fn remove_edge(&self, a: usize, b: usize) -> Result<Dag> {
        if !self.has_edge(a, b) {
            return Err(Error::EdgeAbsent(format!(
                "{} -> {}",
                self.universe.name(a),
                self.universe.name(b)
            )));
        }
        let mut g = self.clone();
        g.parents[b] = g.parents[b].without(a);
        g.children[a] = g.children[a].without(b);
        Ok(g)
    }

    /// Adds `a -> b`, failing if this closes a cycle.
    pub fn add_edge(&self, a: usize, b: usize) -> Result<Dag> {
        let mut parents = self.parents.clone();
        if a == b {
            return Err(Error::SelfLoop(self.universe.name(a).to_string()));
        }
        parents[b] = parents[b].with(a);
        Dag::from_parents(self.universe.clone(), parents)
    }

    /// `set` together with all its ancestors.
    pub fn ancestral_closure(&self, set: VarSet) -> VarSet {
        closure(set, &self.parents)
    }

    /// `set` together with all its descendants.
    pub fn descendant_closure(&self, set: VarSet) -> VarSet {
        closure(set, &self.children)
    }

    /// Kahn's algorithm with the smallest available index first.
    pub fn topological_order(&self) -> Vec<usize> {
        topological_order(&self.parents).expect("acyclic by construction")
    }

    pub fn skeleton(&self) -> UndirectedGraph {
        let adj = (0..self.n()).map(|v| self.neighbours(v)).collect();
        UndirectedGraph::from_adjacency_unchecked(self.universe.clone(), adj)
    }

    /// Unshielded colliders `a -> b <- c` with `a < c`.
    pub fn v_structures(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for b in 0..self.n() {
            let pa: Vec<usize> = self.parents[b].iter().collect();
            for (i, &a) in pa.iter().enumerate() {
                for &c in &pa[i + 1..] {
                    if !self.adjacent(a, c) {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }

    /// Same skeleton and same unshielded colliders.
    pub fn markov_equivalent(&self, other: &Dag) -> bool {
        self.skeleton() == other.skeleton() && self.v_structures() == other.v_structures()
    }

    /// Whether `x` and `y` are d-separated by `z`. Sets are assumed valid.
    ///
    /// Reachability over (node, direction) states: a trail may pass a
    /// non-collider outside `z`, and a collider inside the ancestral closure
    /// of `z`.
    pub fn d_separates(&self, x: VarSet, y: VarSet, z: VarSet) -> bool {
        let an_z = self.ancestral_closure(z);
        // visited_up: reached from a child; visited_down: reached from a parent.
        let mut up = VarSet::EMPTY;
        let mut down = VarSet::EMPTY;
        let mut queue: VecDeque<(usize, bool)> = VecDeque::new();
        for v in x.iter() {
            up = up.with(v);
            queue.push_back((v, true));
        }
        while let Some((v, from_child)) = queue.pop_front() {
            if y.contains(v) {
                return false;
            }
            let blocked = z.contains(v);
            let mut go_up = VarSet::EMPTY;
            let mut go_down = VarSet::EMPTY;
            if from_child {
                if !blocked {
                    go_up = self.parents[v];
                    go_down = self.children[v];
                }
            } else {
                if !blocked {
                    go_down = self.children[v];
                }
                if an_z.contains(v) {
                    go_up = self.parents[v];
                }
            }
            for p in go_up.minus(up).iter() {
                up = up.with(p);
                queue.push_back((p, true));
            }
            for c in go_down.minus(down).iter() {
                down = down.with(c);
                queue.push_back((c, false));
            }
        }
        true
    }
}

fn closure(set: VarSet, step: &[VarSet]) -> VarSet {
    let mut out = set;
    let mut frontier = set;
    while !frontier.is_empty() {
        let mut next = VarSet::EMPTY;
        for v in frontier.iter() {
            next = next.union(step[v]);
        }
        frontier = next.minus(out);
        out = out.union(frontier);
    }
    out
}

pub(crate) fn topological_order(parents: &[VarSet]) -> Option<Vec<usize>> {
    let n = parents.len();
    let mut placed = VarSet::EMPTY;
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n).find(|&v| !placed.contains(v) && parents[v].is_subset(placed))?;
        placed = placed.with(next);
        order.push(next);
    }
    Some(order)
}

pub(crate) fn is_acyclic(parents: &[VarSet]) -> bool {
    topological_order(parents).is_some()
}
