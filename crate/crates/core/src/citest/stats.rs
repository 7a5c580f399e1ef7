use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::cimodel::{CiTriple, VarSet, Verdict};
use crate::error::{Error, Result};

use super::Dataset;

/// Outcome of a single CI test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TestResult {
    #[serde(skip)]
    pub triple: CiTriple,
    pub statistic: f64,
    pub p_value: f64,
    pub verdict: Verdict,
}

impl TestResult {
    pub fn new(triple: CiTriple, statistic: f64, p_value: f64, alpha: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        TestResult {
            triple,
            statistic,
            p_value,
            verdict: Verdict::from_independent(p_value > alpha),
        }
    }
}

fn indices(x: usize, y: usize, z: VarSet) -> Vec<usize> {
    let mut idx = vec![x, y];
    idx.extend(z.iter());
    idx
}

/// Partial correlation of `x` and `y` given `z`, from the inverse of the
/// covariance submatrix.
pub fn partial_correlation(cov: &DMatrix<f64>, x: usize, y: usize, z: VarSet) -> Result<f64> {
    let idx = indices(x, y, z);
    let k = idx.len();
    let sub = DMatrix::from_fn(k, k, |i, j| cov[(idx[i], idx[j])]);
    let p = sub.cholesky().ok_or(Error::Singularity)?.inverse();
    let d = (p[(0, 0)] * p[(1, 1)]).sqrt();
    if d <= 0.0 || !d.is_finite() {
        return Err(Error::Singularity);
    }
    Ok((-p[(0, 1)] / d).clamp(-1.0, 1.0))
}

/// Partial correlation by the first-order recursion, peeling off the
/// largest conditioning variable at each step.
pub fn partial_correlation_recursive(cov: &DMatrix<f64>, x: usize, y: usize, z: VarSet) -> Result<f64> {
    fn rec(
        cov: &DMatrix<f64>,
        a: usize,
        b: usize,
        z: VarSet,
        memo: &mut HashMap<(usize, usize, u64), f64>,
    ) -> Result<f64> {
        let key = (a.min(b), a.max(b), z.bits());
        if let Some(&r) = memo.get(&key) {
            return Ok(r);
        }
        let r = if z.is_empty() {
            let d = (cov[(a, a)] * cov[(b, b)]).sqrt();
            if d <= 0.0 {
                return Err(Error::Singularity);
            }
            cov[(a, b)] / d
        } else {
            let w = z.iter().last().expect("non-empty");
            let rest = z.without(w);
            let rab = rec(cov, a, b, rest, memo)?;
            let raw = rec(cov, a, w, rest, memo)?;
            let rwb = rec(cov, w, b, rest, memo)?;
            let den = (1.0 - raw * raw) * (1.0 - rwb * rwb);
            if den <= 0.0 {
                return Err(Error::Singularity);
            }
            (rab - raw * rwb) / den.sqrt()
        };
        memo.insert(key, r);
        Ok(r)
    }
    rec(cov, x, y, z, &mut HashMap::new())
}

/// Largest absolute partial correlation over pairs of members.
pub fn set_partial_correlation(cov: &DMatrix<f64>, x: VarSet, y: VarSet, z: VarSet) -> Result<f64> {
    let mut best: f64 = 0.0;
    for a in x.iter() {
        for b in y.iter() {
            best = best.max(partial_correlation(cov, a, b, z)?.abs());
        }
    }
    Ok(best)
}

/// Fisher-Z test of a partial correlation estimated from `n` samples.
pub fn fisher_z_from_rho(rho: f64, n: usize, cond: usize, triple: CiTriple, alpha: f64) -> Result<TestResult> {
    if n <= cond + 3 {
        return Err(Error::SampleSize { n, cond });
    }
    let r = rho.clamp(-1.0 + 1e-15, 1.0 - 1e-15);
    let stat = ((n - cond - 3) as f64).sqrt() * r.atanh().abs();
    let p = erfc(stat / std::f64::consts::SQRT_2);
    Ok(TestResult::new(triple, stat, p, alpha))
}

/// Fisher-Z test on a covariance matrix. `x` and `y` must be singletons.
pub fn fisher_z(cov: &DMatrix<f64>, n: usize, triple: &CiTriple, alpha: f64) -> Result<TestResult> {
    let (x, y) = triple
        .pair()
        .ok_or_else(|| Error::Precondition("Fisher-Z needs single variables".into()))?;
    if n <= triple.z.len() + 3 {
        return Err(Error::SampleSize {
            n,
            cond: triple.z.len(),
        });
    }
    let rho = partial_correlation(cov, x, y, triple.z)?;
    fisher_z_from_rho(rho, n, triple.z.len(), *triple, alpha)
}

fn joint_code(data: &Dataset, set: VarSet, r: usize) -> usize {
    set.iter()
        .fold(0usize, |acc, i| acc * data.cardinality(i).max(1) + data.code(i, r))
}

/// Pearson chi-square test of `x ⫫ y | z`, summed over the strata of `z`.
///
/// Within a stratum, empty rows and columns are dropped; a stratum whose
/// remaining table has zero degrees of freedom carries no information and is
/// skipped.
pub fn chi_square(data: &Dataset, triple: &CiTriple, alpha: f64) -> Result<TestResult> {
    if data.rows() == 0 {
        return Err(Error::EmptySample);
    }
    let mut strata: HashMap<usize, HashMap<(usize, usize), f64>> = HashMap::new();
    for r in 0..data.rows() {
        let s = joint_code(data, triple.z, r);
        let a = joint_code(data, triple.x, r);
        let b = joint_code(data, triple.y, r);
        *strata.entry(s).or_default().entry((a, b)).or_default() += 1.0;
    }
    let mut keys: Vec<usize> = strata.keys().copied().collect();
    keys.sort_unstable();
    let mut stat = 0.0;
    let mut df = 0usize;
    for k in keys {
        let cells = &strata[&k];
        let mut rows: HashMap<usize, f64> = HashMap::new();
        let mut cols: HashMap<usize, f64> = HashMap::new();
        let mut total = 0.0;
        for (&(a, b), &c) in cells {
            *rows.entry(a).or_default() += c;
            *cols.entry(b).or_default() += c;
            total += c;
        }
        if rows.len() < 2 || cols.len() < 2 {
            continue;
        }
        df += (rows.len() - 1) * (cols.len() - 1);
        for (&a, &ra) in &rows {
            for (&b, &cb) in &cols {
                let e = ra * cb / total;
                let o = cells.get(&(a, b)).copied().unwrap_or(0.0);
                stat += (o - e) * (o - e) / e;
            }
        }
    }
    if df == 0 {
        return Err(Error::DegenerateStratum);
    }
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    Ok(TestResult::new(*triple, stat, dist.sf(stat), alpha))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    TwoSided,
    /// The first sample is stochastically smaller.
    Less,
    /// The first sample is stochastically larger.
    Greater,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MannWhitney {
    /// `U` statistic of the first sample.
    pub u: f64,
    pub z: f64,
    pub p_value: f64,
}

/// Mann-Whitney `U` test with midranks, tie-corrected variance and a
/// continuity correction of one half.
pub fn mann_whitney(a: &[f64], b: &[f64], alternative: Alternative) -> Result<MannWhitney> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let mut all: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    all.sort_by(|p, q| p.0.total_cmp(&q.0));
    let n = all.len();
    let mut rank_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        let mid = (i + j) as f64 / 2.0 + 1.0;
        rank_a += mid * all[i..=j].iter().filter(|e| e.1).count() as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let u = rank_a - n1 * (n1 + 1.0) / 2.0;
    let mean = n1 * n2 / 2.0;
    let nn = n as f64;
    let var = n1 * n2 / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)).max(1.0));
    if var <= 0.0 {
        return Ok(MannWhitney {
            u,
            z: 0.0,
            p_value: 1.0,
        });
    }
    let sd = var.sqrt();
    let normal = Normal::standard();
    let (z, p) = match alternative {
        Alternative::TwoSided => {
            let d = (u - mean).abs();
            let z = (d - 0.5).max(0.0) / sd;
            (z.copysign(u - mean), (2.0 * normal.sf(z)).min(1.0))
        }
        Alternative::Less => {
            let z = (u - mean + 0.5) / sd;
            (z, normal.cdf(z))
        }
        Alternative::Greater => {
            let z = (u - mean - 0.5) / sd;
            (z, normal.sf(z))
        }
    };
    Ok(MannWhitney { u, z, p_value: p })
}

/// Two-sided Mann-Whitney p-value.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<f64> {
    Ok(mann_whitney(a, b, Alternative::TwoSided)?.p_value)
}
