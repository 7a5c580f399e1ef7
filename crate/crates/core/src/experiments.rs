//! Desk-scale versions of the redundancy experiments. Every run is fully
//! determined by its [`ExperimentConfig`]; trials use child streams of the
//! master seed and are reported in trial order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::cimodel::{
    all_triples, CiStatement, CiTriple, Status, TripleSet, VarSet, Verdict, VariableUniverse,
};
use crate::citest::{empirical_model, mann_whitney, Alternative, CiOracle, Dataset, TestKind};
use crate::discovery::{
    dag_from_order, mmd_tree, mmd_tree_tally, tree_pc, tree_statements, undirected_full_conditional, Mmd, Tally,
};
use crate::error::{Error, Result};
use crate::graphoid::ClosureEngine;
use crate::graphs::{shd, Graph, UndirectedGraph};
use crate::redundancy::{graphoid_redundant_dependences, run_candidates, CandidateStream};
use crate::synth::{
    er_dag, factor_gibbs_sample, linear_gaussian, random_oriented_tree, random_spanning_tree, BinaryBn,
    FactorModel, GibbsConfig, Rng,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    GraphoidPvalues,
    TwoDatasets,
    GraphoidVsGraphical,
    TreeCorrection,
    FlipInjection,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 5] = [
        ExperimentId::GraphoidPvalues,
        ExperimentId::TwoDatasets,
        ExperimentId::GraphoidVsGraphical,
        ExperimentId::TreeCorrection,
        ExperimentId::FlipInjection,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::GraphoidPvalues => "graphoid-pvalues",
            ExperimentId::TwoDatasets => "two-datasets",
            ExperimentId::GraphoidVsGraphical => "graphoid-vs-graphical",
            ExperimentId::TreeCorrection => "tree-correction",
            ExperimentId::FlipInjection => "flip-injection",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown experiment `{s}`")))
    }
}

/// Everything a run depends on. Echoed verbatim in the summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub trials: usize,
    pub n: usize,
    /// Sample sizes; several entries mean one setting per size.
    pub samples: Vec<usize>,
    pub alpha: f64,
    pub seed: u64,
    pub edge_probability: f64,
    pub use_intersection: bool,
    /// Also run the statement-set arms of the tree experiment.
    pub arms: bool,
    /// Flip both orderings of a triple together in flip-injection instead of
    /// single ordered statements.
    #[serde(default)]
    pub symmetric_flips: bool,
    pub gibbs: GibbsConfig,
    /// Continuous dataset resampled in place of synthetic data
    /// (graphoid-vs-graphical only).
    #[serde(default)]
    pub data: Option<PathBuf>,
    /// Where outputs are written. Not part of the hash.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn defaults(experiment: ExperimentId) -> Self {
        let base = ExperimentConfig {
            experiment,
            trials: 200,
            n: 5,
            samples: vec![1000],
            alpha: 0.01,
            seed: 0,
            edge_probability: 0.3,
            use_intersection: true,
            arms: false,
            symmetric_flips: false,
            gibbs: GibbsConfig::default(),
            data: None,
            out: None,
        };
        match experiment {
            ExperimentId::GraphoidPvalues => ExperimentConfig {
                trials: 16,
                n: 4,
                samples: vec![300],
                edge_probability: 0.5,
                ..base
            },
            ExperimentId::TwoDatasets => ExperimentConfig {
                n: 4,
                samples: vec![300],
                ..base
            },
            ExperimentId::GraphoidVsGraphical => ExperimentConfig {
                samples: vec![20, 2000],
                ..base
            },
            ExperimentId::TreeCorrection => ExperimentConfig { arms: true, ..base },
            ExperimentId::FlipInjection => ExperimentConfig {
                samples: Vec::new(),
                ..base
            },
        }
    }

    /// Content hash of the configuration, `sha256:` followed by hex.
    pub fn hash(&self) -> String {
        let body = serde_json::to_string(&ExperimentConfig {
            out: None,
            ..self.clone()
        })
        .expect("config serializes");
        let mut h = Sha256::new();
        h.update(format!("config {}\0", body.len()).as_bytes());
        h.update(body.as_bytes());
        let digest = h.finalize();
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        format!("sha256:{hex}")
    }

    fn rng(&self) -> Rng {
        Rng::new(self.seed)
    }
}

/// CSV body of a run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

/// A named threshold from the experiment's acceptance conditions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail,
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub table: Table,
    pub summary: serde_json::Value,
    pub checks: Vec<Check>,
}

impl ExperimentOutput {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Summary document: config header, hash, statistics and checks.
    pub fn summary_json(&self) -> serde_json::Value {
        json!({
            "config": self.config,
            "hash": self.config.hash(),
            "summary": self.summary,
            "checks": self.checks,
            "passed": self.passed(),
        })
    }

    /// Writes `results.csv` and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("results.csv"), self.table.to_csv()?)?;
        let mut s = serde_json::to_string_pretty(&self.summary_json())?;
        s.push('\n');
        std::fs::write(dir.join("summary.json"), s)?;
        Ok(())
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    if cfg.trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::Precondition(format!("alpha {} outside (0, 1)", cfg.alpha)));
    }
    match cfg.experiment {
        ExperimentId::GraphoidPvalues => graphoid_pvalues(cfg),
        ExperimentId::TwoDatasets => two_datasets(cfg),
        ExperimentId::GraphoidVsGraphical => graphoid_vs_graphical(cfg),
        ExperimentId::TreeCorrection => tree_correction(cfg),
        ExperimentId::FlipInjection => flip_injection(cfg),
    }
}

pub fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    Some(if s.len() % 2 == 1 {
        s[m]
    } else {
        (s[m - 1] + s[m]) / 2.0
    })
}

fn mw(a: &[f64], b: &[f64], alt: Alternative) -> Option<f64> {
    mann_whitney(a, b, alt).ok().map(|r| r.p_value)
}

fn single_sample_size(cfg: &ExperimentConfig) -> Result<usize> {
    match cfg.samples[..] {
        [m] => Ok(m),
        _ => Err(Error::Precondition(format!(
            "{} takes one sample size, got {:?}",
            cfg.experiment, cfg.samples
        ))),
    }
}

fn gaussian_oracle(dag: &crate::graphs::Dag, m: usize, alpha: f64, rng: &mut Rng) -> Result<CiOracle> {
    let scm = linear_gaussian(dag, rng);
    CiOracle::data(Arc::new(scm.sample(m, rng)), TestKind::FisherZ, alpha)
}

fn graphoid_pvalues(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let m = single_sample_size(cfg)?;
    let u = VariableUniverse::numbered("X", cfg.n)?;
    let root = cfg.rng();
    let runs: Vec<Vec<(CiTriple, f64, Status, bool)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = root.child(t as u64);
            let dag = er_dag(&u, cfg.edge_probability, &mut rng)?;
            let mut oracle = gaussian_oracle(&dag, m, cfg.alpha, &mut rng)?;
            let mut triples = all_triples(&u, true, None)?.to_vec();
            triples.shuffle(&mut rng);
            let mut engine = ClosureEngine::new(&u, cfg.use_intersection)?;
            let mut out = Vec::with_capacity(triples.len());
            for tr in triples {
                let implied = engine.status(&tr);
                let (v, p) = oracle.test(&tr)?;
                let mut next = engine.clone();
                let kept = next.add(&CiStatement::new(tr, v));
                if kept {
                    engine = next;
                }
                out.push((tr, p.expect("statistical test"), implied, kept));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(&["repeat", "position", "triple", "p_value", "implied", "kept"]);
    let (mut indep, mut dep) = (Vec::new(), Vec::new());
    let mut skipped = 0;
    for (r, run) in runs.iter().enumerate() {
        for (i, (tr, p, implied, kept)) in run.iter().enumerate() {
            match implied {
                Status::Independent => indep.push(*p),
                Status::Dependent => dep.push(*p),
                Status::Unknown => {}
            }
            skipped += usize::from(!kept);
            table.rows.push(vec![
                r.to_string(),
                i.to_string(),
                u.fmt_triple(tr),
                p.to_string(),
                match implied {
                    Status::Independent => "indep",
                    Status::Dependent => "dep",
                    Status::Unknown => "none",
                }
                .into(),
                kept.to_string(),
            ]);
        }
    }
    let frac = |v: &[f64], f: &dyn Fn(f64) -> bool| {
        (!v.is_empty()).then(|| v.iter().filter(|&&p| f(p)).count() as f64 / v.len() as f64)
    };
    let indep_ok = frac(&indep, &|p| p > cfg.alpha);
    let dep_ok = frac(&dep, &|p| p <= cfg.alpha);
    let first_free = runs.iter().all(|r| r.first().is_none_or(|e| e.2 == Status::Unknown));
    let checks = vec![
        check(
            "implied-independent p-values above alpha >= 0.8",
            indep_ok.is_some_and(|f| f >= 0.8),
            format!("{indep_ok:?} over {} tests", indep.len()),
        ),
        check("first test is never implied", first_free, String::new()),
    ];
    Ok(ExperimentOutput {
        config: cfg.clone(),
        table,
        summary: json!({
            "implied_independent_pvalues": indep,
            "implied_dependent_pvalues": dep,
            "alpha": cfg.alpha,
            "fraction_independent_above_alpha": indep_ok,
            "fraction_dependent_below_alpha": dep_ok,
            "skipped_contradictions": skipped,
        }),
        checks,
    })
}

/// Certified dependences of `g` given `l`, tested one after another.
/// Returns `(candidates, errors)`.
fn candidate_errors(oracle: &mut CiOracle, g: &Graph, l: &[CiStatement]) -> Result<(usize, usize)> {
    let mut stream = CandidateStream::all_singletons(g, l)?;
    let res = run_candidates(&mut stream, |t| Ok(oracle.test(t)?.0))?;
    let errors = res.iter().filter(|(_, v)| v.is_independent()).count();
    Ok((res.len(), errors))
}

fn fraction(c: usize, e: usize) -> Option<f64> {
    (c > 0).then(|| e as f64 / c as f64)
}

fn two_datasets(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let m = single_sample_size(cfg)?;
    let root = cfg.rng();
    // Per trial: [data][model] -> (candidates, errors).
    let runs: Vec<[[(usize, usize); 2]; 2]> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = root.child(t as u64);
            let bn = BinaryBn::diamond(&mut rng);
            let from_dag = bn.sample(m, &mut rng);
            let fm = FactorModel::square(&mut rng);
            let from_ug = factor_gibbs_sample(&fm, m, cfg.gibbs, &mut rng);
            let mut out = [[(0, 0); 2]; 2];
            for (d, data) in [from_dag, from_ug].into_iter().enumerate() {
                let n = data.universe().len();
                let mut o = CiOracle::data(Arc::new(data), TestKind::ChiSquare, cfg.alpha)?
                    .with_degenerate_as_independent(true);
                let order: Vec<usize> = (0..n).collect();
                let dag = dag_from_order(&mut o, &order)?;
                out[d][0] = candidate_errors(&mut o, &dag.graph.into(), &dag.report.conducted)?;
                let ug = undirected_full_conditional(&mut o)?;
                out[d][1] = candidate_errors(&mut o, &ug.graph.into(), &ug.report.conducted)?;
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let kinds = ["dag", "ug"];
    let mut table = Table::new(&["trial", "data", "model", "candidates", "errors", "fraction"]);
    let mut cells: [[Vec<f64>; 2]; 2] = Default::default();
    for (t, run) in runs.iter().enumerate() {
        for d in 0..2 {
            for k in 0..2 {
                let (c, e) = run[d][k];
                let f = fraction(c, e);
                if let Some(f) = f {
                    cells[d][k].push(f);
                }
                table.rows.push(vec![
                    t.to_string(),
                    kinds[d].into(),
                    kinds[k].into(),
                    c.to_string(),
                    e.to_string(),
                    f.map_or(String::new(), |f| f.to_string()),
                ]);
            }
        }
    }
    let mut summary = serde_json::Map::new();
    let mut checks = Vec::new();
    for d in 0..2 {
        let matched = &cells[d][d];
        let other = &cells[d][1 - d];
        let p = mw(matched, other, Alternative::Less);
        let (mm, mo) = (median(matched), median(other));
        summary.insert(
            format!("{}_data", kinds[d]),
            json!({
                "matched_median": mm,
                "mismatched_median": mo,
                "matched_mean": mean(matched),
                "mismatched_mean": mean(other),
                "matched_trials": matched.len(),
                "mismatched_trials": other.len(),
                "mann_whitney_p": p,
            }),
        );
        checks.push(check(
            &format!("{} data: matched model errs less (p < 0.01)", kinds[d]),
            p.is_some_and(|p| p < 0.01) && mm <= mo,
            format!("medians {mm:?} vs {mo:?}, p = {p:?}"),
        ));
    }
    Ok(ExperimentOutput {
        config: cfg.clone(),
        table,
        summary: summary.into(),
        checks,
    })
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

struct GvgTrial {
    purely_graphical: (usize, usize),
    graphoid: (usize, usize),
    recovered: bool,
}

fn graphoid_vs_graphical(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    if cfg.samples.is_empty() {
        return Err(Error::Precondition("no sample sizes given".into()));
    }
    let supplied = match &cfg.data {
        Some(p) => Some(load_dataset(p, TestKind::FisherZ)?),
        None => None,
    };
    let u = match &supplied {
        Some(d) => d.universe().clone(),
        None => VariableUniverse::numbered("X", cfg.n)?,
    };
    let root = cfg.rng();
    let mut table = Table::new(&["samples", "trial", "kind", "candidates", "errors", "fraction", "recovered"]);
    let mut settings = Vec::new();
    for (si, &m) in cfg.samples.iter().enumerate() {
        let base = root.child(si as u64);
        let runs: Vec<GvgTrial> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = base.child(t as u64);
                let (truth, mut o) = match &supplied {
                    Some(d) => {
                        let boot = bootstrap(d, m, &mut rng)?;
                        (None, CiOracle::data(Arc::new(boot), TestKind::FisherZ, cfg.alpha)?)
                    }
                    None => {
                        let dag = er_dag(&u, cfg.edge_probability, &mut rng)?;
                        let o = gaussian_oracle(&dag, m, cfg.alpha, &mut rng)?;
                        (Some(dag), o)
                    }
                };
                // Supplied data is taken to be in causal order.
                let order = match &truth {
                    Some(dag) => dag.topological_order(),
                    None => (0..u.len()).collect(),
                };
                let learned = dag_from_order(&mut o, &order)?;
                let l = learned.report.conducted;
                let g: Graph = learned.graph.clone().into();
                let pg = candidate_errors(&mut o, &g, &l)?;
                let mut gr = (0, 0);
                for s in graphoid_redundant_dependences(&g) {
                    if l.iter().any(|k| k.triple == s.triple) {
                        continue;
                    }
                    gr.0 += 1;
                    if o.test(&s.triple)?.0.is_independent() {
                        gr.1 += 1;
                    }
                }
                Ok(GvgTrial {
                    purely_graphical: pg,
                    graphoid: gr,
                    recovered: truth.is_some_and(|d| learned.graph == d),
                })
            })
            .collect::<Result<_>>()?;
        let (mut pg, mut gr) = (Vec::new(), Vec::new());
        for (t, r) in runs.iter().enumerate() {
            for (kind, (c, e), sink) in [
                ("purely-graphical", r.purely_graphical, &mut pg),
                ("graphoid", r.graphoid, &mut gr),
            ] {
                let f = fraction(c, e);
                if let Some(f) = f {
                    sink.push(f);
                }
                table.rows.push(vec![
                    m.to_string(),
                    t.to_string(),
                    kind.into(),
                    c.to_string(),
                    e.to_string(),
                    f.map_or(String::new(), |f| f.to_string()),
                    r.recovered.to_string(),
                ]);
            }
        }
        let recovery = supplied
            .is_none()
            .then(|| runs.iter().filter(|r| r.recovered).count() as f64 / runs.len() as f64);
        settings.push((m, pg, gr, recovery));
    }

    let mut summary = Vec::new();
    let mut gaps = Vec::new();
    for (m, pg, gr, recovery) in &settings {
        let p = mw(pg, gr, Alternative::Greater);
        let gap = median(pg).zip(median(gr)).map(|(a, b)| a - b);
        gaps.push(gap);
        summary.push(json!({
            "samples": m,
            "purely_graphical_median": median(pg),
            "graphoid_median": median(gr),
            "purely_graphical_mean": mean(pg),
            "graphoid_mean": mean(gr),
            "purely_graphical_trials": pg.len(),
            "graphoid_trials": gr.len(),
            "median_gap": gap,
            "mann_whitney_p": p,
            "recovery_rate": recovery,
        }));
    }
    let mut checks = Vec::new();
    let (small, large) = (0, settings.len() - 1);
    let p_small = mw(&settings[small].1, &settings[small].2, Alternative::Greater);
    checks.push(check(
        "smallest sample: purely graphical errors larger (p < 0.05)",
        p_small.is_some_and(|p| p < 0.05),
        format!("p = {p_small:?}"),
    ));
    if large != small {
        checks.push(check(
            "largest sample: median gap smaller",
            matches!((gaps[large], gaps[small]), (Some(a), Some(b)) if a < b),
            format!("{:?} vs {:?}", gaps[large], gaps[small]),
        ));
        if let Some(r) = settings[large].3 {
            checks.push(check("largest sample: recovery rate >= 0.9", r >= 0.9, format!("{r}")));
        }
    }
    Ok(ExperimentOutput {
        config: cfg.clone(),
        table,
        summary: json!({ "settings": summary }),
        checks,
    })
}

/// Marginal independences obtained by the intersection rule from pairs of
/// single-conditioning independences in `m`, and the statements used.
fn intersection_marginals(u: &VariableUniverse, m: &crate::cimodel::IndependenceModel) -> (TripleSet, TripleSet) {
    let n = u.len();
    let (mut derived, mut used) = (TripleSet::new(), TripleSet::new());
    let ind = |x: usize, y: usize, z: usize| {
        let t = CiTriple::singleton(x, y, VarSet::singleton(z)).expect("distinct");
        (t, m.verdict(&t) == Some(Verdict::Independent))
    };
    for x in 0..n {
        for y in 0..n {
            for w in y + 1..n {
                if x == y || x == w {
                    continue;
                }
                let (t1, a) = ind(x, y, w);
                let (t2, b) = ind(x, w, y);
                if a && b {
                    used.insert(t1);
                    used.insert(t2);
                    for v in [y, w] {
                        derived.insert(CiTriple::singleton(x, v, VarSet::EMPTY).expect("distinct"));
                    }
                }
            }
        }
    }
    (derived, used)
}

const TREE_METHODS: [&str; 5] = ["mmd", "tree-pc", "a1", "a2", "a3"];

fn tree_correction(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let m = single_sample_size(cfg)?;
    let u = VariableUniverse::numbered("X", cfg.n)?;
    let root = cfg.rng();
    let s = tree_statements(&u);
    let runs: Vec<(Vec<Option<usize>>, usize)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = root.child(t as u64);
            let dag = random_oriented_tree(&u, &mut rng);
            let truth: Graph = dag.skeleton().into();
            let mut o = gaussian_oracle(&dag, m, cfg.alpha, &mut rng)?;
            let mut model = empirical_model(&mut o, &s)?;
            let pick = |r: Mmd<UndirectedGraph>| -> Graph { r.representative().clone().into() };
            let mmd = pick(mmd_tree(&model, None)?);
            let tpc = tree_pc(&mut o)?;
            let mut shds = vec![Some(shd(&truth, &mmd)), Some(shd(&truth, &tpc.graph.clone().into()))];
            let mut derived_count = 0;
            if cfg.arms {
                let s_prime: TripleSet = tpc.report.conducted.iter().map(|c| c.triple).collect();
                let (derived, used) = intersection_marginals(&u, &model);
                derived_count = derived.len();
                for d in &derived {
                    let (v, _) = o.test(d)?;
                    model.set(*d, v);
                }
                let a1 = s_prime.union(&used);
                let a2 = a1.union(&derived);
                for arm in [&a1, &a2, &s] {
                    shds.push(Some(shd(&truth, &pick(mmd_tree(&model, Some(arm))?))));
                }
            } else {
                shds.extend([None, None, None]);
            }
            Ok((shds, derived_count))
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(&["trial", "method", "shd"]);
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); TREE_METHODS.len()];
    for (t, (shds, _)) in runs.iter().enumerate() {
        for (k, v) in shds.iter().enumerate() {
            if let Some(v) = v {
                cols[k].push(*v as f64);
                table.rows.push(vec![t.to_string(), TREE_METHODS[k].into(), v.to_string()]);
            }
        }
    }
    let p_mmd = mw(&cols[0], &cols[1], Alternative::Less);
    let (med_mmd, med_pc) = (median(&cols[0]), median(&cols[1]));
    let exact = |v: &[f64]| v.iter().filter(|&&x| x == 0.0).count() as f64 / v.len().max(1) as f64;
    let mut summary = json!({
        "mmd_median_shd": med_mmd,
        "tree_pc_median_shd": med_pc,
        "mmd_mean_shd": mean(&cols[0]),
        "tree_pc_mean_shd": mean(&cols[1]),
        "mmd_recovery": exact(&cols[0]),
        "tree_pc_recovery": exact(&cols[1]),
        "mann_whitney_p": p_mmd,
    });
    let mut checks = vec![check(
        "mmd beats tree-pc (median <=, p < 0.01)",
        p_mmd.is_some_and(|p| p < 0.01) && med_mmd <= med_pc,
        format!("medians {med_mmd:?} vs {med_pc:?}, p = {p_mmd:?}"),
    )];
    if cfg.arms {
        let p_arm = mw(&cols[4], &cols[2], Alternative::Less);
        let derived: Vec<f64> = runs.iter().map(|r| r.1 as f64).collect();
        summary["arms"] = json!({
            "a1_mean_shd": mean(&cols[2]),
            "a2_mean_shd": mean(&cols[3]),
            "a3_mean_shd": mean(&cols[4]),
            "a1_equals_a2": cols[2] == cols[3],
            "a3_vs_a1_mann_whitney_p": p_arm,
            "mean_derived_marginals": mean(&derived),
        });
        checks.push(check("a1 and a2 identical", cols[2] == cols[3], String::new()));
        checks.push(check(
            "a3 beats a1 (p < 0.05)",
            p_arm.is_some_and(|p| p < 0.05),
            format!("p = {p_arm:?}"),
        ));
    }
    Ok(ExperimentOutput {
        config: cfg.clone(),
        table,
        summary,
        checks,
    })
}

/// Verdict counts of a tree over ordered statements, with the listed
/// ordered statements flipped. Index `2i + k` is ordering `k` of triple `i`.
fn flipped_tally(tree: &Graph, triples: &[CiTriple], flips: &[usize]) -> Vec<Tally> {
    let mut wrong = vec![0u32; triples.len()];
    for &f in flips {
        wrong[f / 2] += 1;
    }
    triples
        .iter()
        .zip(wrong)
        .map(|(&triple, w)| {
            let (right, wrong) = (2 - w, w);
            if tree.separates_triple(&triple) {
                Tally { triple, independent: right, dependent: wrong }
            } else {
                Tally { triple, independent: wrong, dependent: right }
            }
        })
        .collect()
}

fn flip_injection(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let u = VariableUniverse::numbered("X", cfg.n)?;
    let triples = tree_statements(&u).to_vec();
    let root = cfg.rng();
    let radius = cfg.n.saturating_sub(1) / 2;
    // Statements as the unit of error: ordered, or both orderings at once.
    let units = if cfg.symmetric_flips { triples.len() } else { 2 * triples.len() };
    let mut table = Table::new(&["flips", "trial", "recovered", "minimizers", "distance"]);
    let mut rates = Vec::new();
    for k in 0..cfg.n {
        let base = root.child(k as u64);
        let runs: Vec<(bool, usize, usize)> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = base.child(t as u64);
                let tree: Graph = random_spanning_tree(&u, &mut rng).into();
                let picked = index::sample(&mut rng, units, k.min(units)).into_vec();
                let flips: Vec<usize> = if cfg.symmetric_flips {
                    picked.iter().flat_map(|&i| [2 * i, 2 * i + 1]).collect()
                } else {
                    picked
                };
                let r = mmd_tree_tally(&u, &flipped_tally(&tree, &triples, &flips))?;
                let ok = r.is_unique() && Graph::from(r.representative().clone()) == tree;
                Ok((ok, r.minimizers.len(), r.distance))
            })
            .collect::<Result<_>>()?;
        for (t, (ok, mins, d)) in runs.iter().enumerate() {
            table.rows.push(vec![k.to_string(), t.to_string(), ok.to_string(), mins.to_string(), d.to_string()]);
        }
        rates.push(runs.iter().filter(|r| r.0).count() as f64 / runs.len() as f64);
    }
    let within = rates[..=radius.min(rates.len() - 1)].iter().all(|&r| r == 1.0);
    let checks = vec![check(
        &format!("recovery 1.0 up to {radius} flips"),
        within,
        format!("{rates:?}"),
    )];
    Ok(ExperimentOutput {
        config: cfg.clone(),
        table,
        summary: json!({
            "radius": radius,
            "recovery_by_flips": rates,
            "symmetric_flips": cfg.symmetric_flips,
        }),
        checks,
    })
}

/// Rows drawn with replacement.
fn bootstrap(d: &Dataset, m: usize, rng: &mut Rng) -> Result<Dataset> {
    use rand::Rng as _;
    let rows = d.rows();
    if rows == 0 {
        return Err(Error::EmptySample);
    }
    let pick: Vec<usize> = (0..m).map(|_| rng.random_range(0..rows)).collect();
    let cols = (0..d.universe().len())
        .map(|c| pick.iter().map(|&r| d.column(c)[r]).collect())
        .collect();
    Dataset::continuous(d.universe().clone(), cols)
}

/// Reads a dataset from CSV, choosing the kind from the test.
pub fn load_dataset(path: &Path, test: TestKind) -> Result<Dataset> {
    let kind = match test {
        TestKind::FisherZ => crate::citest::DataKind::Continuous,
        TestKind::ChiSquare => crate::citest::DataKind::Discrete,
    };
    Dataset::from_csv(std::fs::File::open(path)?, kind)
}
