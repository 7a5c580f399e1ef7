//! Redundancy of CI statements with respect to a list of known statements.
//!
//! Two decidable bounds are provided: the graphoid closure (a statement
//! derivable from the axioms) and exhaustive enumeration of a graph class (a
//! statement forced in every graph consistent with the list). A path-based
//! sufficient criterion identifies dependences that only the graph class
//! forces.
//!
//! The criterion is purely graphical. Whether the statement list itself was
//! generated by a distribution is the caller's assumption.

mod enumeration;
mod surgery;

use std::collections::VecDeque;

use serde::Serialize;

pub use enumeration::{
    codebook_cap, is_graphically_redundant, Codebook, ConsistentGraphs, GraphicalRedundancy,
};
pub use surgery::{graph_surgery, nodes_on_active_paths, SurgeryGraph};

use crate::cimodel::{all_triples, CiStatement, CiTriple, VarSet, Verdict, VariableUniverse};
use crate::error::{Error, Result};
use crate::graphoid::{self, ClosureEngine, Derivation, Entailment};
use crate::graphs::{coupled, s_active_path_exists, Graph, GraphClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RedundancyClass {
    /// Forced by the graph class but not derivable from the axioms.
    PurelyGraphical,
    /// Derivable from the statement list by the graphoid axioms.
    GraphoidRedundant,
    /// Not derivable, and graphical redundancy could not be settled (no
    /// consistent graph, or the class is too large to enumerate).
    GraphicallyRedundantUndetermined,
    NotGraphicallyRedundant,
}

/// Whether `a` and `b` are connected given `c`, with every connecting path
/// carrying an active sub-path of `s`.
fn sets_coupled_over(g: &Graph, a: VarSet, b: VarSet, c: VarSet, s: &CiTriple) -> bool {
    !g.separates(a, b, c)
        && !a
            .iter()
            .any(|p| b.iter().any(|q| s_active_path_exists(g, p, q, c, s)))
}

/// The sufficient criterion evaluated on a (possibly split) graph.
pub fn criterion_on(sg: &SurgeryGraph, l: &[CiStatement], s: &CiTriple) -> Result<bool> {
    let u = sg.original();
    if let Some(bad) = l
        .iter()
        .find(|st| st.verdict.is_independent() && !sg.separates(&st.triple))
    {
        return Err(Error::Precondition(format!(
            "graph is not Markovian to {}",
            u.fmt_statement(bad)
        )));
    }
    if sg.separates(s) {
        return Err(Error::Precondition(format!(
            "{} is separated in the graph",
            u.fmt_triple(s)
        )));
    }
    let sm = sg.map_triple(s);
    Ok(!l.iter().filter(|st| !st.verdict.is_independent()).any(|st| {
        let t = sg.map_triple(&st.triple);
        sets_coupled_over(sg.graph(), t.x, t.y, t.z, &sm)
    }))
}

/// True iff no dependence `(A, B | C)` in `l` has `A` and `B` coupled over
/// `s` given `C`. The dependence `s` is then forced by the graph class.
pub fn sufficient_criterion(g: &Graph, l: &[CiStatement], s: &CiTriple) -> Result<bool> {
    criterion_on(&SurgeryGraph::identity(g), l, s)
}

/// Dependences whose endpoints are coupled in `g` given the conditioning
/// set, over all singleton triples.
pub fn graphoid_redundant_dependences(g: &Graph) -> Vec<CiStatement> {
    let u = g.universe();
    let all = u.all();
    let mut out = Vec::new();
    for x in 0..u.len() {
        for y in x + 1..u.len() {
            for z in all.without(x).without(y).subsets() {
                if coupled(g, x, y, z) {
                    out.push(CiStatement::dep(CiTriple::new_unchecked(
                        VarSet::singleton(x),
                        VarSet::singleton(y),
                        z,
                    )));
                }
            }
        }
    }
    out
}

/// Stateful stream of dependences certified by the sufficient criterion.
///
/// After each candidate the consumer reports the observed verdict. An
/// observed independence splits the current graph so that it stays
/// Markovian to everything seen so far.
#[derive(Clone, Debug)]
pub struct CandidateStream {
    graph: SurgeryGraph,
    known: Vec<CiStatement>,
    pool: VecDeque<CiTriple>,
    truncated: bool,
}

impl CandidateStream {
    /// Candidates are drawn from `pool` in order; triples already in `l` are
    /// skipped.
    pub fn new(g: &Graph, l: &[CiStatement], pool: Vec<CiTriple>) -> Self {
        Self::from_surgery(SurgeryGraph::identity(g), l, pool)
    }

    /// All singleton triples as the pool.
    pub fn all_singletons(g: &Graph, l: &[CiStatement]) -> Result<Self> {
        let pool = all_triples(g.universe(), true, None)?.to_vec();
        Ok(Self::new(g, l, pool))
    }

    pub fn from_surgery(graph: SurgeryGraph, l: &[CiStatement], pool: Vec<CiTriple>) -> Self {
        let pool = pool
            .into_iter()
            .filter(|t| !l.iter().any(|s| s.triple == t.canonicalize()))
            .collect();
        CandidateStream {
            graph,
            known: l.to_vec(),
            pool,
            truncated: false,
        }
    }

    pub fn graph(&self) -> &SurgeryGraph {
        &self.graph
    }

    pub fn known(&self) -> &[CiStatement] {
        &self.known
    }

    /// Next certified dependence, or `None` when the pool is exhausted.
    pub fn next_candidate(&mut self) -> Option<CiStatement> {
        while let Some(t) = self.pool.pop_front() {
            if self.known.iter().any(|s| s.triple == t) {
                continue;
            }
            if self.graph.separates(&t) {
                continue;
            }
            if let Ok(true) = criterion_on(&self.graph, &self.known, &t) {
                return Some(CiStatement::dep(t));
            }
        }
        None
    }

    /// Whether the stream stopped early because the split graph outgrew
    /// the variable cap.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Records an observed verdict. Independences trigger surgery when the
    /// current graph connects the pair. If the split graph would exceed the
    /// variable cap no further candidates are certified.
    pub fn report(&mut self, observed: CiStatement) -> Result<()> {
        if observed.verdict.is_independent() && !self.graph.separates(&observed.triple) {
            match self.graph.surgery(&observed.triple) {
                Ok(g) => self.graph = g,
                Err(Error::CapExceeded { .. }) => {
                    self.truncated = true;
                    self.pool.clear();
                }
                Err(e) => return Err(e),
            }
        }
        self.known.push(observed);
        Ok(())
    }
}

/// Drains a candidate stream against a verdict source, returning each
/// candidate with its observed verdict.
pub fn run_candidates<F>(stream: &mut CandidateStream, mut observe: F) -> Result<Vec<(CiStatement, Verdict)>>
where
    F: FnMut(&CiTriple) -> Result<Verdict>,
{
    let mut out = Vec::new();
    while let Some(c) = stream.next_candidate() {
        let v = observe(&c.triple)?;
        stream.report(CiStatement::new(c.triple, v))?;
        out.push((c, v));
    }
    Ok(out)
}

/// Result of [`classify`] with its witnesses.
#[derive(Clone, Debug)]
pub struct Classification {
    pub class: RedundancyClass,
    pub graphoid: Entailment,
    /// Derivation when the closure determines the statement.
    pub derivation: Option<Derivation>,
    /// Outcome of the path criterion when a graph was supplied and it applied.
    pub criterion: Option<bool>,
    /// Outcome of enumeration when it was run.
    pub graphical: Option<GraphicalRedundancy>,
}

/// Places `s` in the redundancy hierarchy relative to `l`.
///
/// The closure is consulted first. Otherwise, if `g` is given and `s` is a
/// dependence satisfying the sufficient criterion, the statement is purely
/// graphical; in all remaining cases the class is enumerated when it is
/// small enough.
pub fn classify(
    universe: &VariableUniverse,
    l: &[CiStatement],
    s: &CiStatement,
    class: GraphClass,
    g: Option<&Graph>,
    use_intersection: bool,
) -> Result<Classification> {
    let mut engine = ClosureEngine::new(universe, use_intersection)?;
    engine.add_all(l);
    let ent = graphoid::entailment(&engine, s);
    let mut out = Classification {
        class: RedundancyClass::GraphicallyRedundantUndetermined,
        graphoid: ent,
        derivation: engine.explain(&s.triple),
        criterion: None,
        graphical: None,
    };
    match ent {
        Entailment::Matching => {
            out.class = RedundancyClass::GraphoidRedundant;
            return Ok(out);
        }
        // Every graph induces a graphoid, so no consistent graph can match.
        Entailment::Contradicting => {
            out.class = RedundancyClass::NotGraphicallyRedundant;
            return Ok(out);
        }
        Entailment::Undetermined => {}
    }
    if let (Some(g), Verdict::Dependent) = (g, s.verdict) {
        match sufficient_criterion(g, l, &s.triple) {
            Ok(ok) => {
                out.criterion = Some(ok);
                if ok {
                    out.class = RedundancyClass::PurelyGraphical;
                    return Ok(out);
                }
            }
            Err(Error::Precondition(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if universe.len() <= class.cap() {
        let r = is_graphically_redundant(universe, l, s, class)?;
        out.class = match r {
            GraphicalRedundancy::Redundant => RedundancyClass::PurelyGraphical,
            GraphicalRedundancy::NotRedundant(_) => RedundancyClass::NotGraphicallyRedundant,
            GraphicalRedundancy::Vacuous => RedundancyClass::GraphicallyRedundantUndetermined,
        };
        out.graphical = Some(r);
    }
    Ok(out)
}
