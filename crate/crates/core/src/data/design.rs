use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{pseudo_observations, CategoricalSpec, Column, CovariateSchema, Discretization, PseudoDataset, RawDataset};
use crate::copula::UnitPair;
use crate::{Error, Result};

/// Min–max bounds used to map a continuous covariate onto [0, 1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuousScaling {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

impl ContinuousScaling {
    pub fn scale(&self, v: f64) -> f64 {
        (v - self.min) / (self.max - self.min)
    }

    pub fn unscale(&self, s: f64) -> f64 {
        self.min + s * (self.max - self.min)
    }
}

/// A covariate value in original units: a number or a category label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CovariateValue {
    Number(f64),
    Label(String),
}

impl std::fmt::Display for CovariateValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CovariateValue::Number(v) => write!(f, "{v}"),
            CovariateValue::Label(s) => f.write_str(s),
        }
    }
}

/// Named covariate values in original units.
pub type CovariatePoint = BTreeMap<String, CovariateValue>;

/// Column layout of a design matrix: intercept, rescaled continuous columns,
/// then reference-coded dummies for categoricals and discretizations.
///
/// Persisted next to posterior draws so covariate points given in original
/// units can be encoded the same way later.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignLayout {
    pub continuous: Vec<ContinuousScaling>,
    pub categorical: Vec<CategoricalSpec>,
    pub discretizations: Vec<Discretization>,
    pub column_names: Vec<String>,
}

impl DesignLayout {
    pub fn p(&self) -> usize {
        self.column_names.len()
    }

    /// Intercept and continuous columns.
    pub fn continuous_block(&self) -> Vec<usize> {
        (0..=self.continuous.len()).collect()
    }

    /// Dummy columns.
    pub fn discrete_block(&self) -> Vec<usize> {
        (self.continuous.len() + 1..self.p()).collect()
    }

    fn dummies(levels: &[String], label: &str, name: &str) -> Result<Vec<f64>> {
        let k = levels.iter().position(|l| l == label).ok_or_else(|| {
            Error::Schema(format!("`{label}` is not a level of `{name}` (levels {levels:?})"))
        })?;
        Ok((1..levels.len()).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
    }

    /// Design row for a covariate point in original units. A discretized
    /// covariate may be given by its label or by a number for its source.
    pub fn encode(&self, point: &CovariatePoint) -> Result<Vec<f64>> {
        let mut row = Vec::with_capacity(self.p());
        row.push(1.0);
        for c in &self.continuous {
            match point.get(&c.name) {
                Some(CovariateValue::Number(v)) => row.push(c.scale(*v)),
                Some(CovariateValue::Label(s)) => {
                    return Err(Error::Schema(format!("`{}` expects a number, got `{s}`", c.name)))
                }
                None => return Err(Error::Schema(format!("covariate point lacks `{}`", c.name))),
            }
        }
        for c in &self.categorical {
            match point.get(&c.name) {
                Some(v) => row.extend(Self::dummies(&c.levels, &v.to_string(), &c.name)?),
                None => return Err(Error::Schema(format!("covariate point lacks `{}`", c.name))),
            }
        }
        for d in &self.discretizations {
            let label = match (point.get(&d.name), point.get(&d.source)) {
                (Some(CovariateValue::Label(s)), _) => s.clone(),
                (_, Some(CovariateValue::Number(v))) => d.label_of(*v).to_string(),
                _ => {
                    return Err(Error::Schema(format!(
                        "covariate point lacks `{}` (or a number for `{}`)",
                        d.name, d.source
                    )))
                }
            };
            row.extend(Self::dummies(&d.labels, &label, &d.name)?);
        }
        Ok(row)
    }
}

fn continuous<'a>(raw: &'a RawDataset, name: &str) -> Result<&'a [f64]> {
    match raw.column(name) {
        Some(Column::Continuous(v)) => Ok(v),
        Some(Column::Categorical(_)) => Err(Error::Schema(format!("column `{name}` is not numeric"))),
        None => Err(Error::Schema(format!("missing column `{name}`"))),
    }
}

fn level_indices(name: &str, levels: &[String], values: &[String]) -> Result<Vec<usize>> {
    let mut bad = Vec::new();
    let idx: Vec<usize> = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            levels.iter().position(|l| l == v).unwrap_or_else(|| {
                bad.push(i);
                0
            })
        })
        .collect();
    if !bad.is_empty() {
        return Err(Error::Ingestion {
            column: name.to_string(),
            message: format!("unknown category label(s); expected one of {levels:?}"),
            rows: bad,
        });
    }
    Ok(idx)
}

/// Builds pseudo-observations and design rows.
///
/// Continuous covariates are min–max rescaled to [0, 1]; the bounds are kept
/// in the returned dataset's [`DesignLayout`].
pub fn build_design(raw: &RawDataset, schema: &CovariateSchema) -> Result<PseudoDataset<f64>> {
    let n = raw.n();
    let u1 = pseudo_observations(raw.y1())?;
    let u2 = pseudo_observations(raw.y2())?;

    let mut names = vec!["intercept".to_string()];
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut scalings = Vec::new();

    for name in &schema.continuous {
        let v = continuous(raw, name)?;
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        if !(hi > lo) {
            return Err(Error::Schema(format!("continuous column `{name}` is constant")));
        }
        let s = ContinuousScaling { name: name.clone(), min: lo, max: hi };
        cols.push(v.iter().map(|&x| s.scale(x)).collect());
        names.push(name.clone());
        scalings.push(s);
    }

    let mut push_dummies = |name: &str, levels: &[String], idx: Vec<usize>| {
        for (j, level) in levels.iter().enumerate().skip(1) {
            cols.push(idx.iter().map(|&k| if k == j { 1.0 } else { 0.0 }).collect());
            names.push(format!("{name}={level}"));
        }
    };

    for c in &schema.categorical {
        let values = match raw.column(&c.name) {
            Some(Column::Categorical(v)) => v.clone(),
            Some(Column::Continuous(v)) => v.iter().map(|x| x.to_string()).collect(),
            None => return Err(Error::Schema(format!("missing column `{}`", c.name))),
        };
        let idx = level_indices(&c.name, &c.levels, &values)?;
        push_dummies(&c.name, &c.levels, idx);
    }
    for d in &schema.discretizations {
        d.validate()?;
        let v = continuous(raw, &d.source)?;
        let idx = v.iter().map(|&x| d.cuts.iter().filter(|&&c| c <= x).count()).collect();
        push_dummies(&d.name, &d.labels, idx);
    }

    let p = names.len();
    debug_assert_eq!(p, schema.predictor_dim());
    let design: Vec<Vec<f64>> = (0..n)
        .map(|i| std::iter::once(1.0).chain(cols.iter().map(|c| c[i])).collect())
        .collect();
    let pairs = u1
        .iter()
        .zip(&u2)
        .map(|(&a, &b)| UnitPair::new(a, b))
        .collect::<Result<Vec<_>>>()?;
    let layout = DesignLayout {
        continuous: scalings,
        categorical: schema.categorical.clone(),
        discretizations: schema.discretizations.clone(),
        column_names: names,
    };
    Ok(PseudoDataset::new(pairs, design, p)?.with_layout(layout))
}
