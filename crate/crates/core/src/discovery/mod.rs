//! Structure learning from CI verdicts.

mod mmd;
mod pc;
mod sp;

pub use mmd::{mmd_dag, mmd_tree, mmd_tree_tally, tree_statements, Mmd, Tally};
pub use pc::{pc_lite, Pdag, PcResult};
pub use sp::{permutations, sp, SpResult};

use crate::cimodel::{CiStatement, CiTriple, VarSet};
use crate::citest::CiOracle;
use crate::error::{Error, Result};
use crate::graphs::{Dag, UndirectedGraph};
use crate::redundancy::RedundancyClass;

/// What a discovery run asked and how it ended.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiscoveryReport {
    /// Statements in the order they were obtained from the oracle.
    pub conducted: Vec<CiStatement>,
    /// Filled in by callers that classify the conducted statements.
    pub annotations: Vec<(CiTriple, RedundancyClass)>,
    /// Set when the result is not uniquely determined by the run.
    pub tie: bool,
}

impl DiscoveryReport {
    fn since(oracle: &CiOracle, start: usize) -> Self {
        DiscoveryReport {
            conducted: oracle.log()[start..]
                .iter()
                .map(|e| CiStatement::new(e.triple, e.verdict))
                .collect(),
            annotations: Vec::new(),
            tie: false,
        }
    }
}

/// A learned graph with its report.
#[derive(Clone, Debug, PartialEq)]
pub struct Discovered<G> {
    pub graph: G,
    pub report: DiscoveryReport,
}

fn check_order(oracle: &CiOracle, order: &[usize]) -> Result<()> {
    let n = oracle.universe().len();
    let seen: VarSet = order.iter().copied().filter(|&v| v < n).collect();
    if order.len() != n || seen.len() != n {
        return Err(Error::Precondition(format!(
            "{order:?} is not a permutation of {n} variables"
        )));
    }
    Ok(())
}

/// Order-based DAG: each variable's parents are the earlier variables it
/// depends on given all other earlier ones.
pub fn dag_from_order(oracle: &mut CiOracle, order: &[usize]) -> Result<Discovered<Dag>> {
    check_order(oracle, order)?;
    let start = oracle.log().len();
    let mut parents = vec![VarSet::EMPTY; order.len()];
    let mut pred = VarSet::EMPTY;
    for &x in order {
        for y in pred.iter() {
            let t = CiTriple::singleton(x, y, pred.without(y))?;
            if !oracle.test(&t)?.0.is_independent() {
                parents[x] = parents[x].with(y);
            }
        }
        pred = pred.with(x);
    }
    Ok(Discovered {
        graph: Dag::from_parents(oracle.universe().clone(), parents)?,
        report: DiscoveryReport::since(oracle, start),
    })
}

/// Undirected graph with an edge wherever a pair is dependent given all
/// remaining variables.
pub fn undirected_full_conditional(oracle: &mut CiOracle) -> Result<Discovered<UndirectedGraph>> {
    let u = oracle.universe().clone();
    let start = oracle.log().len();
    let mut edges = Vec::new();
    for a in 0..u.len() {
        for b in a + 1..u.len() {
            let t = CiTriple::singleton(a, b, u.all().without(a).without(b))?;
            if !oracle.test(&t)?.0.is_independent() {
                edges.push((a, b));
            }
        }
    }
    Ok(Discovered {
        graph: UndirectedGraph::new(u, &edges)?,
        report: DiscoveryReport::since(oracle, start),
    })
}

/// Edge deletion from the complete graph using single conditioning
/// variables, stopping as soon as the graph is a spanning tree.
///
/// Pairs are visited in index order; conditioning candidates come from the
/// current neighbourhoods of both endpoints. If the tests run out before a
/// tree is reached, the graph at that point is returned with the tie flag.
pub fn tree_pc(oracle: &mut CiOracle) -> Result<Discovered<UndirectedGraph>> {
    let u = oracle.universe().clone();
    let n = u.len();
    let start = oracle.log().len();
    let mut g = UndirectedGraph::complete(u);
    let done = |g: &UndirectedGraph| n < 2 || g.is_spanning_tree();
    'pairs: for a in 0..n {
        for b in a + 1..n {
            if done(&g) {
                break 'pairs;
            }
            if !g.adjacent(a, b) {
                continue;
            }
            let cands = g.neighbours(a).union(g.neighbours(b)).without(a).without(b);
            for c in cands.iter() {
                let t = CiTriple::singleton(a, b, VarSet::singleton(c))?;
                if oracle.test(&t)?.0.is_independent() {
                    g = g.remove_edge(a, b)?;
                    break;
                }
            }
        }
    }
    let mut report = DiscoveryReport::since(oracle, start);
    report.tie = !done(&g);
    Ok(Discovered { graph: g, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cimodel::VariableUniverse;
    use crate::citest::graph_oracle;
    use crate::graphs::Graph;

    #[test]
    fn collider_from_order() {
        let u = VariableUniverse::new(&["X1", "X2", "Y"]).unwrap();
        let g: Graph = Dag::new(u.clone(), &[(0, 2), (1, 2)]).unwrap().into();
        let mut o = graph_oracle(&g, []);
        let r = dag_from_order(&mut o, &[0, 1, 2]).unwrap();
        assert_eq!(r.graph.edges(), vec![(0, 2), (1, 2)]);
        assert_eq!(r.report.conducted.len(), 3);
    }

    #[test]
    fn bad_order_rejected() {
        let u = VariableUniverse::numbered("X", 3).unwrap();
        let mut o = graph_oracle(&Dag::empty(u).into(), []);
        assert!(dag_from_order(&mut o, &[0, 0, 1]).is_err());
        assert!(dag_from_order(&mut o, &[0, 1]).is_err());
    }

    #[test]
    fn full_conditional_chain() {
        let u = VariableUniverse::numbered("X", 4).unwrap();
        let g = UndirectedGraph::chain(u);
        let mut o = graph_oracle(&g.clone().into(), []);
        let r = undirected_full_conditional(&mut o).unwrap();
        assert_eq!(r.graph, g);
        assert_eq!(r.report.conducted.len(), 6);
    }

    #[test]
    fn tree_pc_recovers_tree() {
        let u = VariableUniverse::numbered("X", 5).unwrap();
        let t = UndirectedGraph::new(u, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let mut o = graph_oracle(&t.clone().into(), []);
        let r = tree_pc(&mut o).unwrap();
        assert_eq!(r.graph, t);
        assert!(!r.report.tie);
        assert!(r.report.conducted.iter().all(|s| s.triple.z.len() == 1));
    }
}
