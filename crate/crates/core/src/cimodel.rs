//! Variables, CI triples and statements, independence models and the Markov
//! distance between models.
//!
//! Triples are stored in a canonical form that quotients out the symmetry
//! axiom: the side whose smallest member comes first is always `x`. All other
//! axioms live in [`crate::graphoid`].

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on the universe size for set-valued triple enumeration.
pub const DEFAULT_SET_VALUED_CAP: usize = 8;

/// A set of variable indices, stored as a bitmask. Universes are limited to
/// 64 variables.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct VarSet(pub u64);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn singleton(i: usize) -> Self {
        VarSet(1u64 << i)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VarSet(u64::MAX)
        } else {
            VarSet((1u64 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().fold(VarSet::EMPTY, |s, i| s.with(i))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        VarSet(self.0 | 1u64 << i)
    }

    pub fn without(self, i: usize) -> Self {
        VarSet(self.0 & !(1u64 << i))
    }

    pub fn union(self, other: VarSet) -> Self {
        VarSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VarSet) -> Self {
        VarSet(self.0 & other.0)
    }

    pub fn minus(self, other: VarSet) -> Self {
        VarSet(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: VarSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// The only member of a singleton set.
    pub fn single(self) -> Option<usize> {
        (self.len() == 1).then(|| self.0.trailing_zeros() as usize)
    }

    /// Members in ascending order.
    pub fn iter(self) -> VarSetIter {
        VarSetIter(self.0)
    }

    /// All subsets of `self` (including the empty set and `self`), in
    /// increasing bitmask order.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Lexicographic order of the sorted member lists.
impl Ord for VarSet {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let d = diff.trailing_zeros();
        // Elements strictly above the first differing position.
        let above = if d == 63 { 0 } else { u64::MAX << (d + 1) };
        if self.0 >> d & 1 == 1 {
            // `self` continues with `d`, `other` with something larger or ends.
            if other.0 & above != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        } else if self.0 & above != 0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl PartialOrd for VarSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<usize> for VarSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        VarSet::from_indices(iter)
    }
}

pub struct VarSetIter(u64);

impl Iterator for VarSetIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = VarSet;

    fn next(&mut self) -> Option<VarSet> {
        let cur = self.next?;
        self.next = if cur == self.mask {
            None
        } else {
            Some((cur.wrapping_sub(self.mask)) & self.mask)
        };
        Some(VarSet(cur))
    }
}

#[derive(Debug)]
struct UniverseInner {
    names: Vec<String>,
    index: HashMap<String, usize>,
    set_valued_cap: usize,
}

/// An ordered list of distinct variable names. Cheap to clone.
#[derive(Clone)]
pub struct VariableUniverse(Arc<UniverseInner>);

impl VariableUniverse {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        if names.len() > 64 {
            return Err(Error::UniverseTooLarge(names.len()));
        }
        let mut index = HashMap::with_capacity(names.len());
        let mut owned = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            let n = n.as_ref().to_string();
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::DuplicateVariable(n));
            }
            owned.push(n);
        }
        Ok(VariableUniverse(Arc::new(UniverseInner {
            names: owned,
            index,
            set_valued_cap: DEFAULT_SET_VALUED_CAP,
        })))
    }

    /// Universe named `X1, .., Xn`.
    pub fn numbered(prefix: &str, n: usize) -> Result<Self> {
        let names: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        Self::new(&names)
    }

    /// Same names with a different bound for set-valued enumeration.
    pub fn with_set_valued_cap(&self, cap: usize) -> Self {
        VariableUniverse(Arc::new(UniverseInner {
            names: self.0.names.clone(),
            index: self.0.index.clone(),
            set_valued_cap: cap,
        }))
    }

    pub fn set_valued_cap(&self) -> usize {
        self.0.set_valued_cap
    }

    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0.names[i]
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.0
            .index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn all(&self) -> VarSet {
        VarSet::full(self.len())
    }

    pub fn set<S: AsRef<str>>(&self, names: &[S]) -> Result<VarSet> {
        names
            .iter()
            .map(|n| self.index(n.as_ref()))
            .collect::<Result<Vec<_>>>()
            .map(VarSet::from_indices)
    }

    /// Builds a canonical triple from variable names.
    pub fn triple<S: AsRef<str>>(&self, x: &[S], y: &[S], z: &[S]) -> Result<CiTriple> {
        let t = CiTriple::new(self.set(x)?, self.set(y)?, self.set(z)?)?;
        Ok(t)
    }

    /// Checks that the triple only mentions members of this universe.
    pub fn check(&self, t: &CiTriple) -> Result<()> {
        let all = self.all();
        for s in [t.x, t.y, t.z] {
            if !s.is_subset(all) {
                let bad = s.minus(all).first().unwrap_or_default();
                return Err(Error::UnknownVariable(format!("#{bad}")));
            }
        }
        Ok(())
    }

    pub fn fmt_set(&self, s: VarSet) -> String {
        s.iter().map(|i| self.name(i)).collect::<Vec<_>>().join(",")
    }

    pub fn fmt_triple(&self, t: &CiTriple) -> String {
        format!(
            "({}, {} | {})",
            self.fmt_set(t.x),
            self.fmt_set(t.y),
            self.fmt_set(t.z)
        )
    }

    pub fn fmt_statement(&self, s: &CiStatement) -> String {
        let rel = match s.verdict {
            Verdict::Independent => "_||_",
            Verdict::Dependent => "not _||_",
        };
        format!(
            "{} {rel} {} | {}",
            self.fmt_set(s.triple.x),
            self.fmt_set(s.triple.y),
            self.fmt_set(s.triple.z)
        )
    }
}

impl PartialEq for VariableUniverse {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.names == other.0.names
    }
}

impl Eq for VariableUniverse {}

impl fmt::Debug for VariableUniverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.names.iter()).finish()
    }
}

/// A triple `(x, y | z)` of pairwise disjoint sets with non-empty `x` and `y`.
///
/// Constructors always return the canonical representative, in which the
/// smallest member of `x` precedes the smallest member of `y`. For disjoint
/// sets this is exactly "`x` lexicographically before `y`".
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct CiTriple {
    pub x: VarSet,
    pub y: VarSet,
    pub z: VarSet,
}

impl CiTriple {
    pub fn new(x: VarSet, y: VarSet, z: VarSet) -> Result<Self> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::EmptySide(format!("{x:?} {y:?} | {z:?}")));
        }
        if !x.is_disjoint(y) || !x.is_disjoint(z) || !y.is_disjoint(z) {
            return Err(Error::Overlap(format!("{x:?} {y:?} | {z:?}")));
        }
        Ok(Self::new_unchecked(x, y, z))
    }

    /// Canonicalizes without validation. Callers guarantee non-empty,
    /// pairwise disjoint sides.
    pub fn new_unchecked(x: VarSet, y: VarSet, z: VarSet) -> Self {
        if x.0.trailing_zeros() < y.0.trailing_zeros() {
            CiTriple { x, y, z }
        } else {
            CiTriple { x: y, y: x, z }
        }
    }

    pub fn singleton(x: usize, y: usize, z: VarSet) -> Result<Self> {
        Self::new(VarSet::singleton(x), VarSet::singleton(y), z)
    }

    pub fn is_canonical(&self) -> bool {
        self.x.0.trailing_zeros() < self.y.0.trailing_zeros()
    }

    /// Returns the canonical form of `self` (identity on canonical triples).
    pub fn canonicalize(self) -> Self {
        Self::new_unchecked(self.x, self.y, self.z)
    }

    pub fn is_singleton(&self) -> bool {
        self.x.len() == 1 && self.y.len() == 1
    }

    /// `(x, y)` as indices for singleton triples.
    pub fn pair(&self) -> Option<(usize, usize)> {
        Some((self.x.single()?, self.y.single()?))
    }

    pub fn support(&self) -> VarSet {
        self.x.union(self.y).union(self.z)
    }
}

impl fmt::Debug for CiTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?} | {:?})", self.x, self.y, self.z)
    }
}

/// Pairs first, then conditioning sets by size, then lexicographically.
impl Ord for CiTriple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.x
            .cmp(&other.x)
            .then_with(|| self.y.cmp(&other.y))
            .then_with(|| self.z.len().cmp(&other.z.len()))
            .then_with(|| self.z.cmp(&other.z))
    }
}

impl PartialOrd for CiTriple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Validates a raw triple against a universe and returns its canonical form.
pub fn canonicalize(universe: &VariableUniverse, triple: CiTriple) -> Result<CiTriple> {
    universe.check(&triple)?;
    CiTriple::new(triple.x, triple.y, triple.z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "indep")]
    Independent,
    #[serde(rename = "dep")]
    Dependent,
}

impl Verdict {
    pub fn from_independent(indep: bool) -> Self {
        if indep {
            Verdict::Independent
        } else {
            Verdict::Dependent
        }
    }

    pub fn is_independent(self) -> bool {
        self == Verdict::Independent
    }

    pub fn flip(self) -> Self {
        match self {
            Verdict::Independent => Verdict::Dependent,
            Verdict::Dependent => Verdict::Independent,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Independent => "indep",
            Verdict::Dependent => "dep",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Independent,
    Dependent,
    Unknown,
}

impl From<Option<Verdict>> for Status {
    fn from(v: Option<Verdict>) -> Self {
        match v {
            Some(Verdict::Independent) => Status::Independent,
            Some(Verdict::Dependent) => Status::Dependent,
            None => Status::Unknown,
        }
    }
}

impl Status {
    pub fn verdict(self) -> Option<Verdict> {
        match self {
            Status::Independent => Some(Verdict::Independent),
            Status::Dependent => Some(Verdict::Dependent),
            Status::Unknown => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CiStatement {
    pub triple: CiTriple,
    pub verdict: Verdict,
}

impl CiStatement {
    pub fn new(triple: CiTriple, verdict: Verdict) -> Self {
        CiStatement {
            triple: triple.canonicalize(),
            verdict,
        }
    }

    pub fn indep(triple: CiTriple) -> Self {
        Self::new(triple, Verdict::Independent)
    }

    pub fn dep(triple: CiTriple) -> Self {
        Self::new(triple, Verdict::Dependent)
    }

    pub fn negated(self) -> Self {
        CiStatement {
            triple: self.triple,
            verdict: self.verdict.flip(),
        }
    }
}

/// A canonical, deduplicated set of triples with a deterministic iteration
/// order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TripleSet(BTreeSet<CiTriple>);

impl TripleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, t: CiTriple) -> bool {
        self.0.insert(t.canonicalize())
    }

    pub fn contains(&self, t: &CiTriple) -> bool {
        self.0.contains(&t.canonicalize())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &CiTriple> + '_ {
        self.0.iter()
    }

    pub fn to_vec(&self) -> Vec<CiTriple> {
        self.0.iter().copied().collect()
    }

    pub fn union(&self, other: &TripleSet) -> TripleSet {
        TripleSet(self.0.union(&other.0).copied().collect())
    }
}

impl FromIterator<CiTriple> for TripleSet {
    fn from_iter<T: IntoIterator<Item = CiTriple>>(iter: T) -> Self {
        TripleSet(iter.into_iter().map(|t| t.canonicalize()).collect())
    }
}

impl<'a> IntoIterator for &'a TripleSet {
    type Item = &'a CiTriple;
    type IntoIter = std::collections::btree_set::Iter<'a, CiTriple>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Enumerates CI triples over a universe.
///
/// With `singleton_only`, yields `({X}, {Y} | Z)` for every pair and every
/// `Z ⊆ V∖{X,Y}` with `|Z| ≤ max_cond`. Otherwise all disjoint set-valued
/// triples are produced as well, which is only allowed up to the universe's
/// set-valued cap.
pub fn all_triples(
    universe: &VariableUniverse,
    singleton_only: bool,
    max_cond: Option<usize>,
) -> Result<TripleSet> {
    let n = universe.len();
    let cap = max_cond.unwrap_or(usize::MAX);
    let all = universe.all();
    let mut out = TripleSet::new();
    if singleton_only {
        for x in 0..n {
            for y in x + 1..n {
                let rest = all.without(x).without(y);
                for z in rest.subsets().filter(|z| z.len() <= cap) {
                    out.insert(CiTriple::new_unchecked(
                        VarSet::singleton(x),
                        VarSet::singleton(y),
                        z,
                    ));
                }
            }
        }
        return Ok(out);
    }
    if n > universe.set_valued_cap() {
        return Err(Error::CapExceeded {
            what: "set-valued triple enumeration",
            size: n,
            cap: universe.set_valued_cap(),
        });
    }
    for x in all.subsets().filter(|s| !s.is_empty()) {
        let rest = all.minus(x);
        for y in rest.subsets().filter(|s| !s.is_empty()) {
            if x.0.trailing_zeros() > y.0.trailing_zeros() {
                continue;
            }
            for z in rest.minus(y).subsets().filter(|z| z.len() <= cap) {
                out.insert(CiTriple { x, y, z });
            }
        }
    }
    Ok(out)
}

/// Three-valued map from canonical triples to verdicts. Absent triples are
/// `Unknown`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceModel {
    universe: VariableUniverse,
    status: HashMap<CiTriple, Verdict>,
}

impl IndependenceModel {
    pub fn new(universe: VariableUniverse) -> Self {
        IndependenceModel {
            universe,
            status: HashMap::new(),
        }
    }

    pub fn from_statements<'a, I>(universe: VariableUniverse, statements: I) -> Self
    where
        I: IntoIterator<Item = &'a CiStatement>,
    {
        let mut m = Self::new(universe);
        for s in statements {
            m.set(s.triple, s.verdict);
        }
        m
    }

    pub fn universe(&self) -> &VariableUniverse {
        &self.universe
    }

    pub fn set(&mut self, t: CiTriple, v: Verdict) {
        self.status.insert(t.canonicalize(), v);
    }

    pub fn clear(&mut self, t: &CiTriple) {
        self.status.remove(&t.canonicalize());
    }

    pub fn status(&self, t: &CiTriple) -> Status {
        self.verdict(t).into()
    }

    pub fn verdict(&self, t: &CiTriple) -> Option<Verdict> {
        self.status.get(&t.canonicalize()).copied()
    }

    /// Number of determined triples.
    pub fn len(&self) -> usize {
        self.status.len()
    }

    pub fn is_empty(&self) -> bool {
        self.status.is_empty()
    }

    /// Determined triples as statements, sorted.
    pub fn statements(&self) -> Vec<CiStatement> {
        let mut v: Vec<CiStatement> = self
            .status
            .iter()
            .map(|(t, v)| CiStatement {
                triple: *t,
                verdict: *v,
            })
            .collect();
        v.sort();
        v
    }

    /// Whether every statement agrees with this model.
    pub fn contains_all(&self, statements: &[CiStatement]) -> bool {
        statements
            .iter()
            .all(|s| self.verdict(&s.triple) == Some(s.verdict))
    }

    /// Restriction of the model to the given triples.
    pub fn restrict(&self, s: &TripleSet) -> IndependenceModel {
        let mut m = IndependenceModel::new(self.universe.clone());
        for t in s {
            if let Some(v) = self.verdict(t) {
                m.set(*t, v);
            }
        }
        m
    }
}

/// Number of triples of `s` on which the two models disagree.
pub fn markov_distance(
    a: &IndependenceModel,
    b: &IndependenceModel,
    s: &TripleSet,
) -> Result<usize> {
    let mut d = 0;
    for t in s {
        let (va, vb) = match (a.verdict(t), b.verdict(t)) {
            (Some(va), Some(vb)) => (va, vb),
            _ => return Err(Error::UnknownStatus(a.universe.fmt_triple(t))),
        };
        if va != vb {
            d += 1;
        }
    }
    Ok(d)
}

/// One record of a statement list file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementRecord {
    pub x: Vec<String>,
    pub y: Vec<String>,
    #[serde(default)]
    pub z: Vec<String>,
    pub verdict: Verdict,
}

impl StatementRecord {
    pub fn from_statement(u: &VariableUniverse, s: &CiStatement) -> Self {
        let names = |v: VarSet| v.iter().map(|i| u.name(i).to_string()).collect();
        StatementRecord {
            x: names(s.triple.x),
            y: names(s.triple.y),
            z: names(s.triple.z),
            verdict: s.verdict,
        }
    }

    pub fn to_statement(&self, u: &VariableUniverse) -> Result<CiStatement> {
        Ok(CiStatement::new(u.triple(&self.x, &self.y, &self.z)?, self.verdict))
    }

    fn names(&self) -> impl Iterator<Item = &String> {
        self.x.iter().chain(&self.y).chain(&self.z)
    }
}

/// Universe of every name mentioned, in order of first appearance.
pub fn universe_of_records(records: &[StatementRecord]) -> Result<VariableUniverse> {
    let mut names: Vec<&str> = Vec::new();
    for n in records.iter().flat_map(|r| r.names()) {
        if !names.contains(&n.as_str()) {
            names.push(n);
        }
    }
    VariableUniverse::new(&names)
}

/// Reads the JSON form: an array of `{x, y, z, verdict}` records.
pub fn records_from_json(text: &str) -> Result<Vec<StatementRecord>> {
    Ok(serde_json::from_str(text)?)
}

fn split_members(field: &str) -> Vec<String> {
    field
        .split('|')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

/// Reads the CSV form `x;y;z;verdict`, members separated by `|`. A leading
/// header row is skipped.
pub fn records_from_csv(text: &str) -> Result<Vec<StatementRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b';')
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        if row.len() != 4 {
            return Err(Error::Parse(format!("row {}: expected 4 fields, got {}", i + 1, row.len())));
        }
        if i == 0 && &row[0] == "x" && &row[3] == "verdict" {
            continue;
        }
        let verdict = match &row[3] {
            "indep" => Verdict::Independent,
            "dep" => Verdict::Dependent,
            v => return Err(Error::Parse(format!("row {}: verdict `{v}`", i + 1))),
        };
        out.push(StatementRecord {
            x: split_members(&row[0]),
            y: split_members(&row[1]),
            z: split_members(&row[2]),
            verdict,
        });
    }
    Ok(out)
}

pub fn statements_to_json(u: &VariableUniverse, statements: &[CiStatement]) -> Result<String> {
    let recs: Vec<StatementRecord> = statements.iter().map(|s| StatementRecord::from_statement(u, s)).collect();
    Ok(serde_json::to_string_pretty(&recs)?)
}

pub fn statements_to_csv(u: &VariableUniverse, statements: &[CiStatement]) -> String {
    let join = |v: VarSet| v.iter().map(|i| u.name(i)).collect::<Vec<_>>().join("|");
    let mut out = String::from("x;y;z;verdict\n");
    for s in statements {
        let t = &s.triple;
        out.push_str(&format!("{};{};{};{}\n", join(t.x), join(t.y), join(t.z), s.verdict.as_str()));
    }
    out
}

/// Parses a triple written as `x;y;z` with `|` between members.
pub fn parse_triple(u: &VariableUniverse, text: &str) -> Result<CiTriple> {
    let parts: Vec<&str> = text.split(';').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(Error::Parse(format!("triple `{text}`: expected x;y;z")));
    }
    let z = parts.get(2).map_or_else(Vec::new, |f| split_members(f));
    u.triple(&split_members(parts[0]), &split_members(parts[1]), &z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz() -> VariableUniverse {
        VariableUniverse::new(&["X", "Y", "Z"]).unwrap()
    }

    #[test]
    fn canonicalize_swaps_sides() {
        let u = xyz();
        let t = CiTriple {
            x: u.set(&["Y"]).unwrap(),
            y: u.set(&["X"]).unwrap(),
            z: VarSet::EMPTY,
        };
        let c = canonicalize(&u, t).unwrap();
        assert_eq!(c, u.triple(&["X"], &["Y"], &[] as &[&str]).unwrap());
        assert_eq!(c.x, VarSet::singleton(0));
        assert_eq!(canonicalize(&u, c).unwrap(), c);
    }

    #[test]
    fn canonicalize_errors() {
        let u = xyz();
        assert!(matches!(
            u.triple(&["X"], &["X"], &[] as &[&str]),
            Err(Error::Overlap(_))
        ));
        assert!(matches!(
            u.triple(&[] as &[&str], &["X"], &[] as &[&str]),
            Err(Error::EmptySide(_))
        ));
        assert!(matches!(
            u.triple(&["X"], &["Q"], &[] as &[&str]),
            Err(Error::UnknownVariable(_))
        ));
        assert!(matches!(
            u.triple(&["X"], &["Y"], &["Y"]),
            Err(Error::Overlap(_))
        ));
    }

    #[test]
    fn lexicographic_set_order() {
        let a = VarSet::from_indices([0]);
        let b = VarSet::from_indices([0, 1]);
        let c = VarSet::from_indices([1]);
        let d = VarSet::from_indices([0, 2]);
        assert!(a < b);
        assert!(b < d);
        assert!(d < c);
        assert!(VarSet::EMPTY < a);
    }

    #[test]
    fn subsets_enumerates_power_set() {
        let s = VarSet::from_indices([1, 3, 4]);
        let all: Vec<VarSet> = s.subsets().collect();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|t| t.is_subset(s)));
        assert_eq!(VarSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn triple_counts() {
        let u3 = xyz();
        assert_eq!(all_triples(&u3, true, None).unwrap().len(), 6);
        let u4 = VariableUniverse::numbered("X", 4).unwrap();
        assert_eq!(all_triples(&u4, true, Some(1)).unwrap().len(), 18);
        let u2 = VariableUniverse::numbered("X", 2).unwrap();
        let t2 = all_triples(&u2, true, None).unwrap();
        assert_eq!(t2.len(), 1);
        assert_eq!(
            *t2.iter().next().unwrap(),
            u2.triple(&["X1"], &["X2"], &[] as &[&str]).unwrap()
        );
    }

    #[test]
    fn set_valued_count_matches_assignment_formula() {
        // Each variable goes to x, y, z or nowhere; drop empty sides and halve.
        for n in 2..=5usize {
            let u = VariableUniverse::numbered("V", n).unwrap();
            let got = all_triples(&u, false, None).unwrap().len();
            let expected = (4usize.pow(n as u32) + 2usize.pow(n as u32) - 2 * 3usize.pow(n as u32)) / 2;
            assert_eq!(got, expected, "n = {n}");
        }
    }

    #[test]
    fn set_valued_cap_is_enforced() {
        let u = VariableUniverse::numbered("V", 9).unwrap();
        assert!(matches!(
            all_triples(&u, false, None),
            Err(Error::CapExceeded { .. })
        ));
        assert!(all_triples(&u.with_set_valued_cap(3), true, Some(1)).is_ok());
    }

    #[test]
    fn markov_distance_requires_known_status() {
        let u = xyz();
        let s = all_triples(&u, true, None).unwrap();
        let mut a = IndependenceModel::new(u.clone());
        for t in &s {
            a.set(*t, Verdict::Dependent);
        }
        let b = a.clone();
        assert_eq!(markov_distance(&a, &b, &s).unwrap(), 0);
        let mut c = a.clone();
        c.clear(s.iter().next().unwrap());
        assert!(matches!(
            markov_distance(&a, &c, &s),
            Err(Error::UnknownStatus(_))
        ));
    }

    #[test]
    fn model_lookup_is_symmetric() {
        let u = xyz();
        let mut m = IndependenceModel::new(u.clone());
        let t = u.triple(&["Y"], &["X"], &["Z"]).unwrap();
        m.set(t, Verdict::Independent);
        let raw = CiTriple {
            x: VarSet::singleton(1),
            y: VarSet::singleton(0),
            z: VarSet::singleton(2),
        };
        assert_eq!(m.status(&raw), Status::Independent);
    }

    #[test]
    fn statement_files_round_trip() {
        let u = xyz();
        let l = vec![
            CiStatement::indep(u.triple(&["X"], &["Y"], &["Z"]).unwrap()),
            CiStatement::dep(u.triple(&["X"], &["Z"], &[] as &[&str]).unwrap()),
        ];
        let json = statements_to_json(&u, &l).unwrap();
        let back: Vec<CiStatement> = records_from_json(&json)
            .unwrap()
            .iter()
            .map(|r| r.to_statement(&u).unwrap())
            .collect();
        assert_eq!(back, l);
        let csv = statements_to_csv(&u, &l);
        assert!(csv.contains("X;Z;;dep"));
        let recs = records_from_csv(&csv).unwrap();
        assert_eq!(universe_of_records(&recs).unwrap().names(), &["X", "Y", "Z"]);
        let back: Vec<CiStatement> = recs.iter().map(|r| r.to_statement(&u).unwrap()).collect();
        assert_eq!(back, l);
        assert!(records_from_csv("X;Y;;maybe").is_err());
        assert_eq!(parse_triple(&u, "Y;X;Z").unwrap(), back[0].triple);
        assert!(parse_triple(&u, "X").is_err());
    }
}
