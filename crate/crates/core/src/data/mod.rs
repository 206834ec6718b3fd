//! From raw paired outcomes and covariates to model-ready pseudo-observations
//! and design rows, plus the block g-prior covariance.

mod design;
mod filter;
mod gprior;
mod io;
mod pseudo;

pub use design::{build_design, CovariatePoint, CovariateValue, DesignLayout, ContinuousScaling};
pub use filter::{quantile_type8, quartile_filter};
pub use gprior::{calibrate_gprior, gprior_covariance, GPriorCalibration, GPriorTargets};
pub use io::{load_csv, LoadReport};
pub use pseudo::pseudo_observations;

use serde::{Deserialize, Serialize};

use crate::copula::UnitPair;
use crate::real::Real;
use crate::{Error, Result};

/// One covariate column as ingested.
#[derive(Clone, Debug, PartialEq)]
pub enum Column {
    Continuous(Vec<f64>),
    Categorical(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Continuous(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn select(&self, rows: &[usize]) -> Column {
        match self {
            Column::Continuous(v) => Column::Continuous(rows.iter().map(|&i| v[i]).collect()),
            Column::Categorical(v) => Column::Categorical(rows.iter().map(|&i| v[i].clone()).collect()),
        }
    }
}

/// Paired outcomes with named covariate columns, all of length `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct RawDataset {
    y1: Vec<f64>,
    y2: Vec<f64>,
    columns: Vec<(String, Column)>,
}

impl RawDataset {
    pub fn new(y1: Vec<f64>, y2: Vec<f64>, columns: Vec<(String, Column)>) -> Result<Self> {
        let n = y1.len();
        if y2.len() != n {
            return Err(Error::Dimension { expected: n, got: y2.len() });
        }
        for (name, col) in &columns {
            if col.len() != n {
                return Err(Error::Schema(format!(
                    "column `{name}` has {} rows, outcomes have {n}",
                    col.len()
                )));
            }
        }
        if y1.iter().chain(&y2).any(|v| !v.is_finite()) {
            return Err(Error::Schema("outcomes must be finite".into()));
        }
        Ok(Self { y1, y2, columns })
    }

    pub fn n(&self) -> usize {
        self.y1.len()
    }

    pub fn y1(&self) -> &[f64] {
        &self.y1
    }

    pub fn y2(&self) -> &[f64] {
        &self.y2
    }

    pub fn columns(&self) -> &[(String, Column)] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    /// The subset of rows at `rows`, in that order.
    pub fn select_rows(&self, rows: &[usize]) -> RawDataset {
        RawDataset {
            y1: rows.iter().map(|&i| self.y1[i]).collect(),
            y2: rows.iter().map(|&i| self.y2[i]).collect(),
            columns: self.columns.iter().map(|(n, c)| (n.clone(), c.select(rows))).collect(),
        }
    }
}

/// A categorical covariate and its ordered levels; the first level is the
/// reference and gets no dummy column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoricalSpec {
    pub name: String,
    pub levels: Vec<String>,
}

/// A continuous source column cut into labelled bins; value v falls into bin
/// k when exactly k cut points are ≤ v.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub source: String,
    pub name: String,
    pub cuts: Vec<f64>,
    pub labels: Vec<String>,
}

impl Discretization {
    pub fn label_of(&self, v: f64) -> &str {
        let k = self.cuts.iter().filter(|&&c| c <= v).count();
        &self.labels[k]
    }

    fn validate(&self) -> Result<()> {
        if self.labels.len() != self.cuts.len() + 1 {
            return Err(Error::Schema(format!(
                "discretization `{}` needs {} labels for {} cuts",
                self.name,
                self.cuts.len() + 1,
                self.cuts.len()
            )));
        }
        if self.cuts.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Schema(format!("discretization `{}` cuts must increase", self.name)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CovariateSchema {
    #[serde(default)]
    pub continuous: Vec<String>,
    #[serde(default)]
    pub categorical: Vec<CategoricalSpec>,
    #[serde(default)]
    pub discretizations: Vec<Discretization>,
}

impl CovariateSchema {
    /// Predictor dimension including the intercept.
    pub fn predictor_dim(&self) -> usize {
        1 + self.continuous.len()
            + self.categorical.iter().map(|c| c.levels.len().saturating_sub(1)).sum::<usize>()
            + self.discretizations.iter().map(|d| d.labels.len().saturating_sub(1)).sum::<usize>()
    }

    /// Columns a CSV must provide: continuous ones, then categorical ones.
    pub(crate) fn required_columns(&self) -> (Vec<String>, Vec<String>) {
        let mut cont = self.continuous.clone();
        for d in &self.discretizations {
            if !cont.contains(&d.source) {
                cont.push(d.source.clone());
            }
        }
        let cat = self.categorical.iter().map(|c| c.name.clone()).collect();
        (cont, cat)
    }
}

/// Outcome column names plus the covariate schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSchema {
    pub y1: String,
    pub y2: String,
    #[serde(default)]
    pub covariates: CovariateSchema,
}

/// Pseudo-observation pairs with their design rows (first entry 1).
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoDataset<T> {
    pairs: Vec<UnitPair<T>>,
    design: Vec<Vec<T>>,
    p: usize,
    layout: Option<DesignLayout>,
}

impl<T: Real> PseudoDataset<T> {
    pub fn new(pairs: Vec<UnitPair<T>>, design: Vec<Vec<T>>, p: usize) -> Result<Self> {
        if pairs.len() != design.len() {
            return Err(Error::Dimension { expected: pairs.len(), got: design.len() });
        }
        if p == 0 {
            return Err(Error::domain("predictor dimension must be positive"));
        }
        for row in &design {
            if row.len() != p {
                return Err(Error::Dimension { expected: p, got: row.len() });
            }
            if row[0] != T::one() {
                return Err(Error::Invariant("design rows must start with the intercept 1".into()));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Invariant("design entries must be finite".into()));
            }
        }
        Ok(Self { pairs, design, p, layout: None })
    }

    pub fn with_layout(mut self, layout: DesignLayout) -> Self {
        self.layout = Some(layout);
        self
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn pairs(&self) -> &[UnitPair<T>] {
        &self.pairs
    }

    pub fn design(&self) -> &[Vec<T>] {
        &self.design
    }

    pub fn layout(&self) -> Option<&DesignLayout> {
        self.layout.as_ref()
    }
}
