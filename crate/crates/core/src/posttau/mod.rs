//! Posterior summaries of the conditional Kendall's tau: pointwise curves with
//! credible bands, integrated L1 error, and the exceedance proportions of the
//! tau test statistic.

use serde::{Deserialize, Serialize};

use crate::data::{CovariatePoint, CovariateValue, DesignLayout};
use crate::mcmc::Chain;
use crate::model::ModelState;
use crate::numerics::norm_quantile;
use crate::real::Real;
use crate::{Error, Result};

pub use crate::simulation::scenario_truth;

/// Conditional Kendall's tau of a posterior state at design row `x`.
pub fn tau_at_x<T: Real>(state: &ModelState<T>, x: &[T]) -> Result<T> {
    state.tau_at_x(x)
}

/// A covariate point with its design row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    /// Covariates in original units.
    pub point: CovariatePoint,
    pub row: Vec<f64>,
}

impl GridPoint {
    pub fn encode(layout: &DesignLayout, point: CovariatePoint) -> Result<Self> {
        let row = layout.encode(&point)?;
        Ok(Self { point, row })
    }

    /// A point given directly as a design row; covariates are named by column.
    pub fn from_row(row: Vec<f64>) -> Self {
        let point = row
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &v)| (format!("x{k}"), CovariateValue::Number(v)))
            .collect();
        Self { point, row }
    }
}

/// L equally spaced points from 0.01 to 0.99.
pub fn il1_grid(l: usize) -> Vec<f64> {
    match l {
        0 => vec![],
        1 => vec![0.5],
        _ => (0..l).map(|k| 0.01 + 0.98 * k as f64 / (l - 1) as f64).collect(),
    }
}

/// Grid over a single continuous covariate `name`, encoded through `layout`
/// when the design was rescaled, else as rows (1, x).
pub fn single_covariate_grid(layout: Option<&DesignLayout>, name: &str, xs: &[f64]) -> Result<Vec<GridPoint>> {
    xs.iter()
        .map(|&x| {
            let point: CovariatePoint = [(name.to_string(), CovariateValue::Number(x))].into_iter().collect();
            match layout {
                Some(l) => GridPoint::encode(l, point),
                None => Ok(GridPoint { point, row: vec![1.0, x] }),
            }
        })
        .collect()
}

/// Linear-interpolation (type 7) sample quantile of sorted data.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Pointwise posterior median and central credible band of τ(x).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauCurve {
    pub grid: Vec<GridPoint>,
    pub median: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub level: f64,
}

/// τ(x) for every state (outer) and grid point (inner).
pub fn tau_draws(states: &[ModelState<f64>], grid: &[GridPoint]) -> Result<Vec<Vec<f64>>> {
    states.iter().map(|s| grid.iter().map(|g| s.tau_at_x(&g.row)).collect()).collect()
}

fn chain_states(chain: &Chain) -> Result<Vec<ModelState<f64>>> {
    if chain.n_draws() == 0 {
        return Err(Error::domain("chain has no saved draws"));
    }
    chain.states().collect()
}

/// Tau curve from an explicit set of posterior states.
pub fn tau_curve_from_states(states: &[ModelState<f64>], grid: &[GridPoint], level: f64) -> Result<TauCurve> {
    if states.is_empty() || grid.is_empty() {
        return Err(Error::domain("tau curve needs at least one draw and one grid point"));
    }
    if !(0.0..1.0).contains(&level) {
        return Err(Error::domain(format!("credible level {level} outside [0, 1)")));
    }
    let draws = tau_draws(states, grid)?;
    let tail = (1.0 - level) / 2.0;
    let mut median = Vec::with_capacity(grid.len());
    let mut lower = Vec::with_capacity(grid.len());
    let mut upper = Vec::with_capacity(grid.len());
    let mut col = vec![0.0; states.len()];
    for g in 0..grid.len() {
        for (c, d) in col.iter_mut().zip(&draws) {
            *c = d[g];
        }
        col.sort_by(f64::total_cmp);
        let m = quantile_sorted(&col, 0.5);
        median.push(m);
        if level == 0.0 {
            lower.push(m);
            upper.push(m);
        } else {
            lower.push(quantile_sorted(&col, tail).min(m));
            upper.push(quantile_sorted(&col, 1.0 - tail).max(m));
        }
    }
    Ok(TauCurve { grid: grid.to_vec(), median, lower, upper, level })
}

/// Pointwise posterior median and `level` credible band of τ(x) over `grid`.
pub fn tau_curve(chain: &Chain, grid: &[GridPoint], level: f64) -> Result<TauCurve> {
    tau_curve_from_states(&chain_states(chain)?, grid, level)
}

/// (1/L) Σ |τ̂(x_l) − τ(x_l)|.
pub fn integrated_l1(tau_hat: &[f64], tau_true: &[f64]) -> Result<f64> {
    if tau_hat.len() != tau_true.len() {
        return Err(Error::Dimension { expected: tau_true.len(), got: tau_hat.len() });
    }
    if tau_hat.is_empty() {
        return Err(Error::domain("integrated L1 needs at least one grid point"));
    }
    Ok(tau_hat.iter().zip(tau_true).map(|(a, b)| (a - b).abs()).sum::<f64>() / tau_hat.len() as f64)
}

/// S(τ) = τ / √(2(2n + 5) / (9n(n − 1))), the null-standardized sample tau.
pub fn tau_test_statistic(tau: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("test statistic needs n >= 2, got {n}")));
    }
    let n = n as f64;
    Ok(tau / (2.0 * (2.0 * n + 5.0) / (9.0 * n * (n - 1.0))).sqrt())
}

/// Fraction of `taus` with |S(τ)| above the standard-normal `p` quantile.
pub fn exceedance_from_taus(taus: &[f64], n: usize, p: f64) -> Result<f64> {
    if taus.is_empty() {
        return Err(Error::domain("exceedance needs at least one draw"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("quantile level {p} outside (0, 1)")));
    }
    let z = norm_quantile(p);
    let mut hits = 0usize;
    for &t in taus {
        if tau_test_statistic(t, n)?.abs() > z {
            hits += 1;
        }
    }
    Ok(hits as f64 / taus.len() as f64)
}

/// P(x): fraction of posterior draws whose |S(τ(x))| exceeds z_p.
pub fn exceedance_proportion(chain: &Chain, x: &[f64], n: usize, p: f64) -> Result<f64> {
    let taus = chain_states(chain)?.iter().map(|s| s.tau_at_x(x)).collect::<Result<Vec<_>>>()?;
    exceedance_from_taus(&taus, n, p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauTestReport {
    pub grid: Vec<GridPoint>,
    pub proportion: Vec<f64>,
    pub n: usize,
    /// z_p, the standard-normal quantile used as threshold.
    pub quantile: f64,
}

pub fn tau_test_report_from_states(
    states: &[ModelState<f64>],
    grid: &[GridPoint],
    n: usize,
    p: f64,
) -> Result<TauTestReport> {
    let draws = tau_draws(states, grid)?;
    let proportion = (0..grid.len())
        .map(|g| exceedance_from_taus(&draws.iter().map(|d| d[g]).collect::<Vec<_>>(), n, p))
        .collect::<Result<_>>()?;
    Ok(TauTestReport { grid: grid.to_vec(), proportion, n, quantile: norm_quantile(p) })
}

pub fn tau_test_report(chain: &Chain, grid: &[GridPoint], n: usize, p: f64) -> Result<TauTestReport> {
    tau_test_report_from_states(&chain_states(chain)?, grid, n, p)
}
