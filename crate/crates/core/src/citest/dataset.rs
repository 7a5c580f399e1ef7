use std::collections::BTreeSet;
use std::io::{Read, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cimodel::VariableUniverse;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataKind {
    Continuous,
    Discrete,
}

/// Rectangular data without missing values, stored by column.
///
/// Discrete columns hold category codes `0..k` as floats; the original
/// labels are kept in `levels`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    universe: VariableUniverse,
    kind: DataKind,
    columns: Vec<Vec<f64>>,
    levels: Vec<Vec<String>>,
}

impl Dataset {
    pub fn continuous(universe: VariableUniverse, columns: Vec<Vec<f64>>) -> Result<Self> {
        Self::check_shape(&universe, &columns)?;
        if columns.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Dataset("non-finite value".into()));
        }
        Ok(Dataset {
            universe,
            kind: DataKind::Continuous,
            columns,
            levels: Vec::new(),
        })
    }

    /// Discrete data from integer codes; each column's levels are `0..=max`.
    pub fn discrete(universe: VariableUniverse, columns: Vec<Vec<u32>>) -> Result<Self> {
        let levels = columns
            .iter()
            .map(|c| {
                let k = c.iter().copied().max().map_or(0, |m| m as usize + 1);
                (0..k).map(|i| i.to_string()).collect()
            })
            .collect();
        let columns: Vec<Vec<f64>> = columns
            .into_iter()
            .map(|c| c.into_iter().map(f64::from).collect())
            .collect();
        Self::check_shape(&universe, &columns)?;
        Ok(Dataset {
            universe,
            kind: DataKind::Discrete,
            columns,
            levels,
        })
    }

    fn check_shape(universe: &VariableUniverse, columns: &[Vec<f64>]) -> Result<()> {
        if columns.len() != universe.len() {
            return Err(Error::Dataset(format!(
                "{} columns for {} variables",
                columns.len(),
                universe.len()
            )));
        }
        if let Some(c) = columns.iter().find(|c| c.len() != columns[0].len()) {
            return Err(Error::Dataset(format!(
                "ragged columns: {} vs {} rows",
                c.len(),
                columns[0].len()
            )));
        }
        Ok(())
    }

    /// Pads every discrete column to at least `k` levels.
    pub(crate) fn ensure_levels(&mut self, k: usize) {
        for lv in &mut self.levels {
            while lv.len() < k {
                lv.push(lv.len().to_string());
            }
        }
    }

    pub fn universe(&self) -> &VariableUniverse {
        &self.universe
    }

    pub fn kind(&self) -> DataKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    /// Number of categories of a discrete column.
    pub fn cardinality(&self, i: usize) -> usize {
        self.levels.get(i).map_or(0, Vec::len)
    }

    /// Category code of row `r` in column `i`.
    pub fn code(&self, i: usize, r: usize) -> usize {
        self.columns[i][r] as usize
    }

    /// Sample covariance (denominator `m - 1`).
    pub fn covariance(&self) -> DMatrix<f64> {
        let n = self.columns.len();
        let m = self.rows();
        let means: Vec<f64> = self
            .columns
            .iter()
            .map(|c| c.iter().sum::<f64>() / m as f64)
            .collect();
        let denom = (m.max(2) - 1) as f64;
        DMatrix::from_fn(n, n, |i, j| {
            self.columns[i]
                .iter()
                .zip(&self.columns[j])
                .map(|(a, b)| (a - means[i]) * (b - means[j]))
                .sum::<f64>()
                / denom
        })
    }

    pub fn from_csv<R: Read>(reader: R, kind: DataKind) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let names: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let universe = VariableUniverse::new(&names)?;
        let mut raw: Vec<Vec<String>> = vec![Vec::new(); names.len()];
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != names.len() {
                return Err(Error::Dataset(format!("row {} has {} fields", line + 1, rec.len())));
            }
            for (i, field) in rec.iter().enumerate() {
                let f = field.trim();
                if f.is_empty() || f.eq_ignore_ascii_case("na") || f.eq_ignore_ascii_case("nan") {
                    return Err(Error::Dataset(format!(
                        "missing value in row {}, column {}",
                        line + 1,
                        names[i]
                    )));
                }
                raw[i].push(f.to_string());
            }
        }
        match kind {
            DataKind::Continuous => {
                let columns = raw
                    .into_iter()
                    .map(|c| {
                        c.iter()
                            .map(|s| {
                                s.parse::<f64>()
                                    .map_err(|_| Error::Dataset(format!("not a number: {s}")))
                            })
                            .collect::<Result<Vec<f64>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::continuous(universe, columns)
            }
            DataKind::Discrete => {
                let mut columns = Vec::with_capacity(raw.len());
                let mut levels = Vec::with_capacity(raw.len());
                for c in raw {
                    let lv: Vec<String> = c.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
                    columns.push(
                        c.iter()
                            .map(|s| lv.binary_search(s).expect("level present") as f64)
                            .collect(),
                    );
                    levels.push(lv);
                }
                Self::check_shape(&universe, &columns)?;
                Ok(Dataset {
                    universe,
                    kind,
                    columns,
                    levels,
                })
            }
        }
    }

    pub fn to_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.universe.names())?;
        for r in 0..self.rows() {
            let row: Vec<String> = (0..self.columns.len())
                .map(|i| match self.kind {
                    DataKind::Continuous => format!("{}", self.columns[i][r]),
                    DataKind::Discrete => self.levels[i][self.code(i, r)].clone(),
                })
                .collect();
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let text = "a,b\n1.5,2\n-1,0.25\n";
        let d = Dataset::from_csv(text.as_bytes(), DataKind::Continuous).unwrap();
        assert_eq!(d.rows(), 2);
        let mut out = Vec::new();
        d.to_csv(&mut out).unwrap();
        let back = Dataset::from_csv(out.as_slice(), DataKind::Continuous).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn missing_values_rejected() {
        let text = "a,b\n1,\n";
        assert!(matches!(
            Dataset::from_csv(text.as_bytes(), DataKind::Continuous),
            Err(Error::Dataset(_))
        ));
    }

    #[test]
    fn discrete_levels() {
        let text = "x,y\nno,1\nyes,0\nno,0\n";
        let d = Dataset::from_csv(text.as_bytes(), DataKind::Discrete).unwrap();
        assert_eq!(d.cardinality(0), 2);
        assert_eq!(d.code(0, 1), 1);
    }
}
