//! Ground fixed-point closure of CI statements under the semi-graphoid
//! axioms, optionally Intersection, and their contrapositives.
//!
//! Every triple over the universe gets a base-4 code (one digit per
//! variable: absent, in x, in y, in z), so statuses and traces live in flat
//! tables of size 4^n. A rule instance is a quadruple `(X, Y, W, Z)` of
//! disjoint sets with `X, Y, W` non-empty; it relates the five triples
//!
//! ```text
//! t1 = (X, Y∪W | Z)   t2 = (X, Y | Z)     t3 = (X, W | Z)
//! t4 = (X, Y | Z∪W)   t5 = (X, W | Z∪Y)
//! ```
//!
//! Symmetry is built into the canonical triple form.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::cimodel::{CiStatement, CiTriple, IndependenceModel, Status, VarSet, Verdict, VariableUniverse};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Input,
    Decomposition,
    WeakUnion,
    Contraction,
    Intersection,
    DecompositionContrapositive,
    WeakUnionContrapositive,
    ContractionContrapositive,
    IntersectionContrapositive,
}

/// One rule application: the premises it consumed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub rule: Rule,
    pub premises: Vec<CiStatement>,
}

/// Derivation tree down to input statements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub statement: CiStatement,
    pub rule: Rule,
    pub premises: Vec<Derivation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contradiction {
    pub triple: CiTriple,
    /// Derivation of the independence.
    pub independent: Derivation,
    /// Derivation of the dependence.
    pub dependent: Derivation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Entailment {
    /// The closure assigns the statement's own verdict.
    Matching,
    /// The closure assigns the opposite verdict.
    Contradicting,
    Undetermined,
}

impl Entailment {
    pub fn is_determined(self) -> bool {
        self != Entailment::Undetermined
    }
}

#[derive(Clone, Debug)]
pub enum Consistency {
    Ok,
    Contradiction(Box<Contradiction>),
}

impl Consistency {
    pub fn is_ok(&self) -> bool {
        matches!(self, Consistency::Ok)
    }
}

const UNKNOWN: u8 = 0;
const INDEP: u8 = 1;
const DEP: u8 = 2;

fn encode(v: Verdict) -> u8 {
    match v {
        Verdict::Independent => INDEP,
        Verdict::Dependent => DEP,
    }
}

/// Incremental closure state. Statements can be added at any time; the
/// closure is recomputed from the new facts only.
#[derive(Clone, Debug)]
pub struct ClosureEngine {
    universe: VariableUniverse,
    use_intersection: bool,
    all: VarSet,
    spread: Vec<u32>,
    status: Vec<u8>,
    traces: Vec<Option<Trace>>,
    determined: Vec<CiTriple>,
    queue: VecDeque<CiTriple>,
    contradiction: Option<(CiTriple, Trace)>,
}

impl ClosureEngine {
    pub fn new(universe: &VariableUniverse, use_intersection: bool) -> Result<Self> {
        let n = universe.len();
        if n > universe.set_valued_cap() {
            return Err(Error::CapExceeded {
                what: "graphoid closure",
                size: n,
                cap: universe.set_valued_cap(),
            });
        }
        let spread = (0u64..1 << n)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| 1u32 << (2 * i)).sum())
            .collect();
        let size = 1usize << (2 * n);
        Ok(ClosureEngine {
            universe: universe.clone(),
            use_intersection,
            all: universe.all(),
            spread,
            status: vec![UNKNOWN; size],
            traces: vec![None; size],
            determined: Vec::new(),
            queue: VecDeque::new(),
            contradiction: None,
        })
    }

    pub fn universe(&self) -> &VariableUniverse {
        &self.universe
    }

    pub fn uses_intersection(&self) -> bool {
        self.use_intersection
    }

    fn code(&self, x: VarSet, y: VarSet, z: VarSet) -> usize {
        let t = CiTriple::new_unchecked(x, y, z);
        (self.spread[t.x.0 as usize] + 2 * self.spread[t.y.0 as usize] + 3 * self.spread[t.z.0 as usize])
            as usize
    }

    fn get(&self, x: VarSet, y: VarSet, z: VarSet) -> u8 {
        self.status[self.code(x, y, z)]
    }

    /// Records a derived verdict. Returns `false` once a contradiction exists.
    fn derive(&mut self, t: CiTriple, v: u8, rule: Rule, premises: Vec<CiStatement>) -> bool {
        if self.contradiction.is_some() {
            return false;
        }
        let t = t.canonicalize();
        let c = self.code(t.x, t.y, t.z);
        match self.status[c] {
            UNKNOWN => {
                self.status[c] = v;
                self.traces[c] = Some(Trace { rule, premises });
                self.determined.push(t);
                self.queue.push_back(t);
                true
            }
            s if s == v => true,
            _ => {
                self.contradiction = Some((t, Trace { rule, premises }));
                false
            }
        }
    }

    /// Adds a statement and closes. Returns `false` if the closure is (or
    /// already was) contradictory.
    pub fn add(&mut self, s: &CiStatement) -> bool {
        self.add_all(std::slice::from_ref(s))
    }

    pub fn add_all(&mut self, statements: &[CiStatement]) -> bool {
        for s in statements {
            if !self.derive(s.triple, encode(s.verdict), Rule::Input, Vec::new()) {
                return false;
            }
        }
        self.run();
        self.contradiction.is_none()
    }

    fn run(&mut self) {
        while let Some(t) = self.queue.pop_front() {
            if self.contradiction.is_some() {
                self.queue.clear();
                return;
            }
            let (a, b, c) = (t.x, t.y, t.z);
            let rest = self.all.minus(a).minus(b).minus(c);
            for (p, q) in [(a, b), (b, a)] {
                // t as (X, Y∪W | Z): unordered splits of q.
                if q.len() >= 2 {
                    for y in q.subsets() {
                        let w = q.minus(y);
                        if y.is_empty() || w.is_empty() || y.0 > w.0 {
                            continue;
                        }
                        if !self.fire(p, y, w, c) {
                            return;
                        }
                    }
                }
                // t as (X, Y | Z) or (X, W | Z).
                for w in rest.subsets().filter(|w| !w.is_empty()) {
                    if !self.fire(p, q, w, c) {
                        return;
                    }
                }
                // t as (X, Y | Z∪W) or (X, W | Z∪Y).
                for w in c.subsets().filter(|w| !w.is_empty()) {
                    if !self.fire(p, q, w, c.minus(w)) {
                        return;
                    }
                }
            }
        }
    }

    /// Applies every rule to the instance `(X, Y, W, Z)` in both `Y`/`W`
    /// orders.
    fn fire(&mut self, x: VarSet, y: VarSet, w: VarSet, z: VarSet) -> bool {
        self.fire_ordered(x, y, w, z) && self.fire_ordered(x, w, y, z)
    }

    fn fire_ordered(&mut self, x: VarSet, y: VarSet, w: VarSet, z: VarSet) -> bool {
        let t1 = CiTriple::new_unchecked(x, y.union(w), z);
        let t2 = CiTriple::new_unchecked(x, y, z);
        let t4 = CiTriple::new_unchecked(x, y, z.union(w));
        let t5 = CiTriple::new_unchecked(x, w, z.union(y));
        let s1 = self.get(t1.x, t1.y, t1.z);
        let s2 = self.get(t2.x, t2.y, t2.z);
        let s4 = self.get(t4.x, t4.y, t4.z);
        let s5 = self.get(t5.x, t5.y, t5.z);
        let i = CiStatement::indep;
        let d = CiStatement::dep;

        let mut out: Vec<(CiTriple, u8, Rule, Vec<CiStatement>)> = Vec::new();
        if s1 == INDEP {
            if s2 != INDEP {
                out.push((t2, INDEP, Rule::Decomposition, vec![i(t1)]));
            }
            if s4 != INDEP {
                out.push((t4, INDEP, Rule::WeakUnion, vec![i(t1)]));
            }
        }
        if s1 != INDEP {
            if s2 == INDEP && s5 == INDEP {
                out.push((t1, INDEP, Rule::Contraction, vec![i(t2), i(t5)]));
            } else if self.use_intersection && s4 == INDEP && s5 == INDEP {
                out.push((t1, INDEP, Rule::Intersection, vec![i(t4), i(t5)]));
            }
        }
        if s1 != DEP {
            if s2 == DEP {
                out.push((t1, DEP, Rule::DecompositionContrapositive, vec![d(t2)]));
            } else if s4 == DEP {
                out.push((t1, DEP, Rule::WeakUnionContrapositive, vec![d(t4)]));
            }
        }
        if s1 == DEP {
            if s2 == INDEP && s5 != DEP {
                out.push((t5, DEP, Rule::ContractionContrapositive, vec![i(t2), d(t1)]));
            }
            if s5 == INDEP && s2 != DEP {
                out.push((t2, DEP, Rule::ContractionContrapositive, vec![i(t5), d(t1)]));
            }
            if self.use_intersection && s4 == INDEP && s5 != DEP {
                out.push((t5, DEP, Rule::IntersectionContrapositive, vec![i(t4), d(t1)]));
            }
        }
        for (t, v, rule, premises) in out {
            if !self.derive(t, v, rule, premises) {
                return false;
            }
        }
        true
    }

    pub fn status(&self, t: &CiTriple) -> Status {
        let t = t.canonicalize();
        match self.get(t.x, t.y, t.z) {
            INDEP => Status::Independent,
            DEP => Status::Dependent,
            _ => Status::Unknown,
        }
    }

    pub fn verdict(&self, t: &CiTriple) -> Option<Verdict> {
        self.status(t).verdict()
    }

    pub fn is_contradictory(&self) -> bool {
        self.contradiction.is_some()
    }

    pub fn trace(&self, t: &CiTriple) -> Option<&Trace> {
        let t = t.canonicalize();
        self.traces[self.code(t.x, t.y, t.z)].as_ref()
    }

    /// Determined triples in the order they were derived.
    pub fn determined(&self) -> &[CiTriple] {
        &self.determined
    }

    fn tree(&self, statement: CiStatement, trace: &Trace) -> Derivation {
        Derivation {
            statement,
            rule: trace.rule,
            premises: trace
                .premises
                .iter()
                .map(|p| self.explain(&p.triple).expect("premises are determined"))
                .collect(),
        }
    }

    /// Derivation tree of a determined triple.
    pub fn explain(&self, t: &CiTriple) -> Option<Derivation> {
        let v = self.verdict(t)?;
        let trace = self.trace(t)?;
        Some(self.tree(CiStatement::new(*t, v), trace))
    }

    pub fn contradiction(&self) -> Option<Contradiction> {
        let (t, second) = self.contradiction.as_ref()?;
        let first_verdict = self.verdict(t).expect("contradicted triple is determined");
        let first = self.explain(t).expect("contradicted triple has a trace");
        let second = self.tree(CiStatement::new(*t, first_verdict.flip()), second);
        let (independent, dependent) = if first_verdict.is_independent() {
            (first, second)
        } else {
            (second, first)
        };
        Some(Contradiction {
            triple: *t,
            independent,
            dependent,
        })
    }

    pub fn model(&self) -> IndependenceModel {
        let mut m = IndependenceModel::new(self.universe.clone());
        for t in &self.determined {
            m.set(*t, self.verdict(t).expect("determined"));
        }
        m
    }

    pub fn into_result(self) -> ClosureResult {
        ClosureResult {
            model: self.model(),
            contradiction: self.contradiction(),
            traces: self
                .determined
                .iter()
                .map(|t| (*t, self.trace(t).expect("determined").clone()))
                .collect(),
        }
    }
}

/// Outcome of a closure run.
#[derive(Clone, Debug)]
pub struct ClosureResult {
    pub model: IndependenceModel,
    pub contradiction: Option<Contradiction>,
    /// First derivation of every determined triple.
    pub traces: HashMap<CiTriple, Trace>,
}

impl ClosureResult {
    pub fn status(&self, t: &CiTriple) -> Status {
        self.model.status(t)
    }

    pub fn explain(&self, t: &CiTriple) -> Option<Derivation> {
        let v = self.model.verdict(t)?;
        let trace = self.traces.get(&t.canonicalize())?;
        Some(Derivation {
            statement: CiStatement::new(*t, v),
            rule: trace.rule,
            premises: trace
                .premises
                .iter()
                .map(|p| self.explain(&p.triple).expect("premises are determined"))
                .collect(),
        })
    }
}

/// Least fixed point of the rule set over all set-valued triples. Closure
/// stops at the first contradiction, which is reported in the result.
pub fn closure(
    universe: &VariableUniverse,
    l: &[CiStatement],
    use_intersection: bool,
) -> Result<ClosureResult> {
    let mut e = ClosureEngine::new(universe, use_intersection)?;
    e.add_all(l);
    Ok(e.into_result())
}

/// Whether the axioms force a verdict for `s` from `l`.
pub fn is_graphoid_redundant(
    universe: &VariableUniverse,
    l: &[CiStatement],
    s: &CiStatement,
    use_intersection: bool,
) -> Result<Entailment> {
    let mut e = ClosureEngine::new(universe, use_intersection)?;
    e.add_all(l);
    Ok(entailment(&e, s))
}

/// Entailment of `s` by the current state of an engine.
pub fn entailment(e: &ClosureEngine, s: &CiStatement) -> Entailment {
    match e.verdict(&s.triple) {
        Some(v) if v == s.verdict => Entailment::Matching,
        Some(_) => Entailment::Contradicting,
        None => Entailment::Undetermined,
    }
}

pub fn check_consistency(
    universe: &VariableUniverse,
    l: &[CiStatement],
    use_intersection: bool,
) -> Result<Consistency> {
    let mut e = ClosureEngine::new(universe, use_intersection)?;
    e.add_all(l);
    Ok(match e.contradiction() {
        None => Consistency::Ok,
        Some(c) => Consistency::Contradiction(Box::new(c)),
    })
}
