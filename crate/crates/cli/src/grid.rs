//! Covariate grids for tau summaries.

use ddpmc::data::{CovariatePoint, CovariateValue, DesignLayout};
use ddpmc::posttau::{il1_grid, single_covariate_grid, GridPoint};
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

/// One grid axis: explicit values, or `points` equally spaced values over `range`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    #[serde(default)]
    pub values: Vec<CovariateValue>,
    #[serde(default)]
    pub range: Option<[f64; 2]>,
    #[serde(default)]
    pub points: Option<usize>,
}

impl Axis {
    fn expand(&self) -> Result<Vec<CovariateValue>> {
        match (&self.range, self.values.is_empty()) {
            (None, false) => Ok(self.values.clone()),
            (Some([a, b]), true) => {
                let m = self.points.unwrap_or(2);
                if m < 2 || !(a < b) {
                    return Err(CliError::Usage(format!("axis `{}` needs a < b and at least 2 points", self.name)));
                }
                Ok((0..m).map(|k| CovariateValue::Number(a + (b - a) * k as f64 / (m - 1) as f64)).collect())
            }
            _ => Err(CliError::Usage(format!("axis `{}` needs either values or a range", self.name))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    /// Equally spaced points on [0.01, 0.99] along one continuous covariate.
    Il1 {
        #[serde(default = "default_covariate")]
        covariate: String,
        #[serde(default = "default_points")]
        points: usize,
    },
    /// Cartesian product of axes; the last axis varies fastest.
    Product { axes: Vec<Axis> },
    /// Design rows given directly, intercept first.
    Rows { rows: Vec<Vec<f64>> },
}

fn default_covariate() -> String {
    "x".into()
}

fn default_points() -> usize {
    100
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Il1 { covariate: default_covariate(), points: default_points() }
    }
}

/// Grid points plus the covariate names used as table columns, in order.
pub fn build_grid(spec: &GridSpec, layout: Option<&DesignLayout>, p: usize) -> Result<(Vec<String>, Vec<GridPoint>)> {
    match spec {
        GridSpec::Il1 { covariate, points } => {
            let grid = single_covariate_grid(layout, covariate, &il1_grid(*points))?;
            Ok((vec![covariate.clone()], grid))
        }
        GridSpec::Product { axes } => {
            let layout = layout.ok_or_else(|| {
                CliError::Usage("a product grid needs a chain fitted from a named design".into())
            })?;
            if axes.is_empty() {
                return Err(CliError::Usage("product grid has no axes".into()));
            }
            let values = axes.iter().map(Axis::expand).collect::<Result<Vec<_>>>()?;
            let mut points: Vec<CovariatePoint> = vec![CovariatePoint::new()];
            for (axis, vals) in axes.iter().zip(&values) {
                points = points
                    .into_iter()
                    .flat_map(|pt| {
                        vals.iter().map(move |v| {
                            let mut pt = pt.clone();
                            pt.insert(axis.name.clone(), v.clone());
                            pt
                        })
                    })
                    .collect();
            }
            let grid = points.into_iter().map(|pt| GridPoint::encode(layout, pt)).collect::<ddpmc::Result<_>>()?;
            Ok((axes.iter().map(|a| a.name.clone()).collect(), grid))
        }
        GridSpec::Rows { rows } => {
            if let Some(r) = rows.iter().find(|r| r.len() != p) {
                return Err(ddpmc::Error::Dimension { expected: p, got: r.len() }.into());
            }
            let names = (1..p).map(|k| format!("x{k}")).collect();
            Ok((names, rows.iter().cloned().map(GridPoint::from_row).collect()))
        }
    }
}
