//! Verdict sources for CI triples: graphs with injected errors, statistical
//! tests on data, and exact covariance matrices.

mod dataset;
mod stats;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use dataset::{DataKind, Dataset};
pub use stats::{
    chi_square, fisher_z, fisher_z_from_rho, mann_whitney, mann_whitney_u, partial_correlation,
    partial_correlation_recursive, set_partial_correlation, Alternative, MannWhitney, TestResult,
};

use crate::cimodel::{CiStatement, CiTriple, IndependenceModel, TripleSet, Verdict, VariableUniverse};
use crate::error::{Error, Result};
use crate::graphs::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    FisherZ,
    ChiSquare,
}

#[derive(Clone, Debug)]
enum Source {
    Graph {
        graph: Graph,
        flips: BTreeSet<CiTriple>,
    },
    Data {
        data: Arc<Dataset>,
        cov: Option<DMatrix<f64>>,
        test: TestKind,
        alpha: f64,
        degenerate_independent: bool,
    },
    Covariance {
        cov: DMatrix<f64>,
        n: usize,
        alpha: f64,
    },
}

/// One answered query.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogEntry {
    #[serde(skip)]
    pub triple: CiTriple,
    pub verdict: Verdict,
    pub p_value: Option<f64>,
}

/// A verdict source with an append-only query log. Repeated queries are
/// answered from a cache but still logged.
#[derive(Clone, Debug)]
pub struct CiOracle {
    universe: VariableUniverse,
    source: Source,
    log: Vec<LogEntry>,
    cache: HashMap<CiTriple, (Verdict, Option<f64>)>,
}

impl CiOracle {
    /// Separation in `graph`, inverted on the triples in `flips`.
    pub fn graph<I: IntoIterator<Item = CiTriple>>(graph: Graph, flips: I) -> Self {
        CiOracle {
            universe: graph.universe().clone(),
            source: Source::Graph {
                flips: flips.into_iter().map(CiTriple::canonicalize).collect(),
                graph,
            },
            log: Vec::new(),
            cache: HashMap::new(),
        }
    }

    /// Statistical tests on data at level `alpha`.
    pub fn data(data: Arc<Dataset>, test: TestKind, alpha: f64) -> Result<Self> {
        match (test, data.kind()) {
            (TestKind::FisherZ, DataKind::Continuous) | (TestKind::ChiSquare, DataKind::Discrete) => {}
            _ => {
                return Err(Error::Dataset(format!(
                    "{test:?} does not apply to {:?} data",
                    data.kind()
                )))
            }
        }
        let cov = (test == TestKind::FisherZ).then(|| data.covariance());
        Ok(CiOracle {
            universe: data.universe().clone(),
            source: Source::Data {
                data,
                cov,
                test,
                alpha,
                degenerate_independent: false,
            },
            log: Vec::new(),
            cache: HashMap::new(),
        })
    }

    /// Fisher-Z on a fixed covariance matrix with nominal sample size `n`.
    pub fn covariance(universe: VariableUniverse, cov: DMatrix<f64>, n: usize, alpha: f64) -> Result<Self> {
        if cov.nrows() != universe.len() || cov.ncols() != universe.len() {
            return Err(Error::Dataset(format!(
                "{}x{} covariance for {} variables",
                cov.nrows(),
                cov.ncols(),
                universe.len()
            )));
        }
        Ok(CiOracle {
            universe,
            source: Source::Covariance { cov, n, alpha },
            log: Vec::new(),
            cache: HashMap::new(),
        })
    }

    /// Treat a chi-square test whose strata are all degenerate as
    /// independent with p = 1 instead of failing.
    pub fn with_degenerate_as_independent(mut self, on: bool) -> Self {
        if let Source::Data {
            degenerate_independent,
            ..
        } = &mut self.source
        {
            *degenerate_independent = on;
        }
        self
    }

    pub fn universe(&self) -> &VariableUniverse {
        &self.universe
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    /// Number of distinct triples answered so far.
    pub fn distinct_queries(&self) -> usize {
        self.cache.len()
    }

    fn evaluate(&self, t: &CiTriple) -> Result<(Verdict, Option<f64>)> {
        match &self.source {
            Source::Graph { graph, flips } => {
                let v = graph.verdict(t);
                Ok((if flips.contains(t) { v.flip() } else { v }, None))
            }
            Source::Data {
                data,
                cov,
                test,
                alpha,
                degenerate_independent,
            } => {
                let r = match test {
                    TestKind::FisherZ => fisher_z(cov.as_ref().expect("covariance"), data.rows(), t, *alpha),
                    TestKind::ChiSquare => chi_square(data, t, *alpha),
                };
                match r {
                    Ok(r) => Ok((r.verdict, Some(r.p_value))),
                    Err(Error::DegenerateStratum) if *degenerate_independent => {
                        Ok((Verdict::Independent, Some(1.0)))
                    }
                    Err(e) => Err(e),
                }
            }
            Source::Covariance { cov, n, alpha } => {
                let r = fisher_z(cov, *n, t, *alpha)?;
                Ok((r.verdict, Some(r.p_value)))
            }
        }
    }

    /// Verdict and p-value (for statistical sources) of a triple.
    pub fn test(&mut self, t: &CiTriple) -> Result<(Verdict, Option<f64>)> {
        let t = t.canonicalize();
        self.universe.check(&t)?;
        let r = match self.cache.get(&t) {
            Some(r) => *r,
            None => {
                let r = self.evaluate(&t)?;
                self.cache.insert(t, r);
                r
            }
        };
        self.log.push(LogEntry {
            triple: t,
            verdict: r.0,
            p_value: r.1,
        });
        Ok(r)
    }

    pub fn query(&mut self, t: &CiTriple) -> Result<CiStatement> {
        let (v, _) = self.test(t)?;
        Ok(CiStatement::new(*t, v))
    }
}

/// Oracle answering with the graph's own separations.
pub fn graph_oracle<I: IntoIterator<Item = CiTriple>>(g: &Graph, flips: I) -> CiOracle {
    CiOracle::graph(g.clone(), flips)
}

/// Queries every triple of `s`.
pub fn empirical_model(oracle: &mut CiOracle, s: &TripleSet) -> Result<IndependenceModel> {
    let mut m = IndependenceModel::new(oracle.universe().clone());
    for t in s {
        let st = oracle.query(t)?;
        m.set(st.triple, st.verdict);
    }
    Ok(m)
}
