use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use redci_core::cimodel::{
    all_triples, parse_triple, records_from_csv, records_from_json, universe_of_records, CiStatement,
    StatementRecord, Verdict, VariableUniverse,
};
use redci_core::citest::{empirical_model, CiOracle, DataKind, Dataset, TestKind};
use redci_core::discovery::{
    dag_from_order, mmd_dag, mmd_tree, pc_lite, sp, tree_pc, tree_statements, undirected_full_conditional,
    DiscoveryReport,
};
use redci_core::experiments::{run_experiment, ExperimentConfig, ExperimentId};
use redci_core::graphoid::{ClosureEngine, Derivation};
use redci_core::graphs::{Graph, GraphClass, GraphFile};
use redci_core::redundancy::{classify, GraphicalRedundancy};
use redci_core::synth::{
    er_dag, factor_gibbs_sample, linear_gaussian, random_oriented_tree, BinaryBn, FactorModel, GibbsConfig, Rng,
};

#[derive(Parser)]
#[command(name = "redci", version, about = "Redundant CI tests for structure learning")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Graphoid closure of a statement list, queried at given triples.
    Closure {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        no_intersection: bool,
        /// Triple `x;y;z`, members separated by `|`. Repeatable.
        #[arg(long)]
        query: Vec<String>,
    },
    /// Redundancy class of a target statement given a list.
    Classify {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        statements: PathBuf,
        #[arg(long)]
        target: String,
        /// Verdict of the target; defaults to the graph's verdict, else dependent.
        #[arg(long)]
        verdict: Option<VerdictArg>,
        #[arg(long, value_enum, default_value = "dags")]
        class: ClassArg,
        #[arg(long)]
        no_intersection: bool,
    },
    /// Structure learning against a graph oracle or a dataset.
    Discover {
        #[arg(long, value_enum)]
        algo: Algo,
        /// `graph.json[,flips.json]` or `data.csv`.
        #[arg(long)]
        oracle: String,
        #[arg(long, value_enum, default_value = "continuous")]
        kind: KindArg,
        /// Variable order for `order`, comma separated names.
        #[arg(long)]
        order: Option<String>,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthetic graphs and data.
    Synth {
        #[arg(long, value_enum)]
        kind: SynthKind,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge probability for `er-dag`.
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        /// Graph to sample from (`lingauss` needs a DAG, `factor` an undirected graph).
        #[arg(long)]
        graph: Option<PathBuf>,
        /// `data.csv,graph.json`
        #[arg(long)]
        out: String,
    },
    /// Desk-scale experiment runs.
    Experiment {
        id: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        n: Option<usize>,
        /// Comma separated sample sizes.
        #[arg(long)]
        samples: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        no_intersection: bool,
        /// Skip the statement-set arms of tree-correction.
        #[arg(long)]
        no_arms: bool,
        /// Flip-injection errors flip both orderings of a triple.
        #[arg(long)]
        symmetric_flips: bool,
        /// Continuous CSV for graphoid-vs-graphical.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Exit with status 2 when a threshold is missed.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerdictArg {
    Indep,
    Dep,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Dags,
    Undirected,
    Trees,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Continuous,
    Discrete,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Order,
    Fullcond,
    Sp,
    MmdTree,
    MmdDag,
    TreePc,
    PcLite,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    Tree,
    ErDag,
    Lingauss,
    BinaryBn,
    Factor,
}

fn read_records(path: &Path) -> Result<Vec<StatementRecord>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let recs = if path.extension().is_some_and(|e| e == "csv") {
        records_from_csv(&text)?
    } else {
        records_from_json(&text)?
    };
    Ok(recs)
}

fn to_statements(u: &VariableUniverse, recs: &[StatementRecord]) -> Result<Vec<CiStatement>> {
    Ok(recs.iter().map(|r| r.to_statement(u)).collect::<redci_core::Result<_>>()?)
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let gf: GraphFile = serde_json::from_str(&text)?;
    Ok(gf.into_graph()?)
}

fn derivation_json(u: &VariableUniverse, d: &Derivation) -> Value {
    json!({
        "statement": u.fmt_statement(&d.statement),
        "rule": d.rule,
        "premises": d.premises.iter().map(|p| derivation_json(u, p)).collect::<Vec<_>>(),
    })
}

fn statements_json(u: &VariableUniverse, l: &[CiStatement]) -> Value {
    json!(l.iter().map(|s| StatementRecord::from_statement(u, s)).collect::<Vec<_>>())
}

fn emit(v: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn closure_cmd(input: &Path, no_intersection: bool, queries: &[String]) -> Result<Value> {
    let recs = read_records(input)?;
    let u = universe_of_records(&recs)?;
    let l = to_statements(&u, &recs)?;
    let mut engine = ClosureEngine::new(&u, !no_intersection)?;
    engine.add_all(&l);
    let contradiction = engine.contradiction().map(|c| {
        json!({
            "triple": u.fmt_triple(&c.triple),
            "independent": derivation_json(&u, &c.independent),
            "dependent": derivation_json(&u, &c.dependent),
        })
    });
    let mut results = Vec::new();
    for q in queries {
        let t = parse_triple(&u, q)?;
        results.push(json!({
            "triple": u.fmt_triple(&t),
            "status": engine.status(&t),
            "derivation": engine.explain(&t).map(|d| derivation_json(&u, &d)),
        }));
    }
    Ok(json!({ "variables": u.names(), "contradiction": contradiction, "queries": results }))
}

fn classify_cmd(
    graph: Option<&Path>,
    statements: &Path,
    target: &str,
    verdict: Option<VerdictArg>,
    class: ClassArg,
    no_intersection: bool,
) -> Result<Value> {
    let g = graph.map(read_graph).transpose()?;
    let recs = read_records(statements)?;
    let u = match &g {
        Some(g) => g.universe().clone(),
        None => universe_of_records(&recs)?,
    };
    let l = to_statements(&u, &recs)?;
    let t = parse_triple(&u, target)?;
    let v = match (verdict, &g) {
        (Some(VerdictArg::Indep), _) => Verdict::Independent,
        (Some(VerdictArg::Dep), _) => Verdict::Dependent,
        (None, Some(g)) => g.verdict(&t),
        (None, None) => Verdict::Dependent,
    };
    let class = match class {
        ClassArg::Dags => GraphClass::Dags,
        ClassArg::Undirected => GraphClass::UndirectedGraphs,
        ClassArg::Trees => GraphClass::SpanningTrees,
    };
    let s = CiStatement::new(t, v);
    let c = classify(&u, &l, &s, class, g.as_ref(), !no_intersection)?;
    let graphical = c.graphical.as_ref().map(|r| match r {
        GraphicalRedundancy::Redundant => json!({ "result": "redundant" }),
        GraphicalRedundancy::Vacuous => json!({ "result": "vacuous" }),
        GraphicalRedundancy::NotRedundant(w) => {
            json!({ "result": "not-redundant", "counterexample": GraphFile::from_graph(w) })
        }
    });
    Ok(json!({
        "statement": u.fmt_statement(&s),
        "class": c.class,
        "graphoid": c.graphoid,
        "criterion": c.criterion,
        "graphical": graphical,
        "derivation": c.derivation.as_ref().map(|d| derivation_json(&u, d)),
    }))
}

fn build_oracle(spec: &str, kind: KindArg, alpha: f64) -> Result<CiOracle> {
    let mut parts = spec.split(',');
    let first = PathBuf::from(parts.next().unwrap_or_default());
    if first.extension().is_some_and(|e| e == "json") {
        let g = read_graph(&first)?;
        let mut flips = Vec::new();
        if let Some(f) = parts.next() {
            // Listed statements override the graph; only disagreements matter.
            for s in to_statements(g.universe(), &read_records(Path::new(f))?)? {
                if g.verdict(&s.triple) != s.verdict {
                    flips.push(s.triple);
                }
            }
        }
        return Ok(CiOracle::graph(g, flips));
    }
    let file = fs::File::open(&first).with_context(|| format!("opening {}", first.display()))?;
    let (dk, tk) = match kind {
        KindArg::Continuous => (DataKind::Continuous, TestKind::FisherZ),
        KindArg::Discrete => (DataKind::Discrete, TestKind::ChiSquare),
    };
    let data = Dataset::from_csv(file, dk)?;
    Ok(CiOracle::data(Arc::new(data), tk, alpha)?.with_degenerate_as_independent(true))
}

fn report_json(u: &VariableUniverse, r: &DiscoveryReport) -> Value {
    json!({
        "conducted": statements_json(u, &r.conducted),
        "tie": r.tie,
    })
}

fn discover_cmd(algo: Algo, oracle: &str, kind: KindArg, order: Option<&str>, alpha: f64) -> Result<Value> {
    let mut o = build_oracle(oracle, kind, alpha)?;
    let u = o.universe().clone();
    let gf = |g: Graph| GraphFile::from_graph(&g);
    let out = match algo {
        Algo::Order => {
            let order: Vec<usize> = match order {
                Some(s) => s.split(',').map(|n| u.index(n.trim())).collect::<redci_core::Result<_>>()?,
                None => (0..u.len()).collect(),
            };
            let r = dag_from_order(&mut o, &order)?;
            json!({ "graph": gf(r.graph.into()), "report": report_json(&u, &r.report) })
        }
        Algo::Fullcond => {
            let r = undirected_full_conditional(&mut o)?;
            json!({ "graph": gf(r.graph.into()), "report": report_json(&u, &r.report) })
        }
        Algo::TreePc => {
            let r = tree_pc(&mut o)?;
            json!({ "graph": gf(r.graph.into()), "report": report_json(&u, &r.report) })
        }
        Algo::Sp => {
            let r = sp(&mut o)?;
            json!({
                "graphs": r.graphs.iter().map(|g| gf(g.clone().into())).collect::<Vec<_>>(),
                "edges": r.edges,
                "report": report_json(&u, &r.report),
            })
        }
        Algo::MmdTree => {
            let s = tree_statements(&u);
            let m = empirical_model(&mut o, &s)?;
            let r = mmd_tree(&m, None)?;
            json!({
                "graphs": r.minimizers.iter().map(|g| gf(g.clone().into())).collect::<Vec<_>>(),
                "distance": r.distance,
                "runner_up": r.runner_up,
                "tie": !r.is_unique(),
            })
        }
        Algo::MmdDag => {
            let s = all_triples(&u, true, None)?;
            let m = empirical_model(&mut o, &s)?;
            let r = mmd_dag(&m)?;
            json!({
                "graphs": r.minimizers.iter().map(|g| gf(g.clone().into())).collect::<Vec<_>>(),
                "distance": r.distance,
                "runner_up": r.runner_up,
                "tie": !r.is_unique(),
            })
        }
        Algo::PcLite => {
            let r = pc_lite(&mut o)?;
            let name = |v: usize| u.name(v).to_string();
            json!({
                "directed": r.pdag.directed_edges().into_iter().map(|(a, b)| (name(a), name(b))).collect::<Vec<_>>(),
                "undirected": r.pdag.undirected_edges().into_iter().map(|(a, b)| (name(a), name(b))).collect::<Vec<_>>(),
                "non_markovian": statements_json(&u, &r.non_markovian),
                "report": report_json(&u, &r.report),
            })
        }
    };
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn synth_cmd(kind: SynthKind, n: usize, samples: usize, seed: u64, p: f64, graph: Option<&Path>, out: &str) -> Result<()> {
    let (data_path, graph_path) = match out.split_once(',') {
        Some((d, g)) => (PathBuf::from(d), Some(PathBuf::from(g))),
        None => (PathBuf::from(out), None),
    };
    let u = VariableUniverse::numbered("X", n)?;
    let mut rng = Rng::new(seed);
    let given = graph.map(read_graph).transpose()?;
    let (g, data): (Graph, Dataset) = match kind {
        SynthKind::Tree | SynthKind::ErDag | SynthKind::Lingauss => {
            let dag = match (kind, given) {
                (SynthKind::Tree, _) => random_oriented_tree(&u, &mut rng),
                (SynthKind::ErDag, _) => er_dag(&u, p, &mut rng)?,
                (_, Some(Graph::Directed(d))) => d,
                _ => bail!("lingauss needs --graph with a directed graph"),
            };
            let scm = linear_gaussian(&dag, &mut rng);
            let data = scm.sample(samples, &mut rng);
            (dag.into(), data)
        }
        SynthKind::BinaryBn => {
            let bn = BinaryBn::diamond(&mut rng);
            let data = bn.sample(samples, &mut rng);
            (bn.dag().clone().into(), data)
        }
        SynthKind::Factor => {
            let fm = match given {
                Some(Graph::Undirected(ug)) => FactorModel::random(ug, &mut rng),
                Some(_) => bail!("factor needs an undirected --graph"),
                None => FactorModel::square(&mut rng),
            };
            let data = factor_gibbs_sample(&fm, samples, GibbsConfig::default(), &mut rng);
            (fm.graph().clone().into(), data)
        }
    };
    let f = fs::File::create(&data_path).with_context(|| format!("creating {}", data_path.display()))?;
    data.to_csv(f)?;
    if let Some(gp) = graph_path {
        fs::write(&gp, serde_json::to_string_pretty(&GraphFile::from_graph(&g))? + "\n")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Closure {
            input,
            no_intersection,
            query,
        } => emit(&closure_cmd(&input, no_intersection, &query)?, None)?,
        Cmd::Classify {
            graph,
            statements,
            target,
            verdict,
            class,
            no_intersection,
        } => emit(
            &classify_cmd(graph.as_deref(), &statements, &target, verdict, class, no_intersection)?,
            None,
        )?,
        Cmd::Discover {
            algo,
            oracle,
            kind,
            order,
            alpha,
            out,
        } => emit(&discover_cmd(algo, &oracle, kind, order.as_deref(), alpha)?, out.as_deref())?,
        Cmd::Synth {
            kind,
            n,
            samples,
            seed,
            p,
            graph,
            out,
        } => synth_cmd(kind, n, samples, seed, p, graph.as_deref(), &out)?,
        Cmd::Experiment {
            id,
            trials,
            seed,
            n,
            samples,
            alpha,
            no_intersection,
            no_arms,
            symmetric_flips,
            data,
            out,
            check,
        } => {
            let id: ExperimentId = id.parse()?;
            let mut cfg = ExperimentConfig::defaults(id);
            cfg.seed = seed;
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(n) = n {
                cfg.n = n;
            }
            if let Some(s) = samples {
                cfg.samples = s
                    .split(',')
                    .map(|x| x.trim().parse::<usize>())
                    .collect::<Result<_, _>>()
                    .context("--samples")?;
            }
            if let Some(a) = alpha {
                cfg.alpha = a;
            }
            cfg.use_intersection = !no_intersection;
            cfg.arms &= !no_arms;
            cfg.symmetric_flips = symmetric_flips;
            cfg.data = data;
            cfg.out = Some(out.clone());
            let res = run_experiment(&cfg)?;
            res.write(&out)?;
            for c in &res.checks {
                eprintln!("{} {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
            }
            if check && !res.passed() {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
