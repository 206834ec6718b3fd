use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::numerics::RngStream;
use crate::{Error, Result};

/// Relative pivot size below which a Gram matrix counts as rank deficient.
const PIVOT_TOL: f64 = 1e-10;

fn block_inverse(design: &[Vec<f64>], cols: &[usize], block: &str) -> Result<DMatrix<f64>> {
    let k = cols.len();
    let mut gram = DMatrix::<f64>::zeros(k, k);
    for row in design {
        for (a, &ca) in cols.iter().enumerate() {
            for (b, &cb) in cols.iter().enumerate().skip(a) {
                gram[(a, b)] += row[ca] * row[cb];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            gram[(a, b)] = gram[(b, a)];
        }
    }
    let singular = |detail: String| Error::Singular { block: block.to_string(), detail };
    let chol = gram
        .clone()
        .cholesky()
        .ok_or_else(|| singular("X'X has no Cholesky factor".into()))?;
    let l = chol.l();
    for j in 0..k {
        let scale = gram[(j, j)];
        if !(scale > 0.0) || l[(j, j)] * l[(j, j)] < PIVOT_TOL * scale {
            return Err(singular(format!("column {} is (nearly) collinear with earlier columns", cols[j])));
        }
    }
    Ok(chol.inverse())
}

/// Block-diagonal g-prior covariance `blockdiag(c1 (X̃'X̃)⁻¹, c2 (X̄'X̄)⁻¹)`.
///
/// `continuous` and `discrete` list the design columns of each block and must
/// together cover every column exactly once; `discrete` may be empty.
pub fn gprior_covariance(
    design: &[Vec<f64>],
    continuous: &[usize],
    discrete: &[usize],
    c1: f64,
    c2: f64,
) -> Result<DMatrix<f64>> {
    let p = continuous.len() + discrete.len();
    if !(c1 > 0.0) || (!discrete.is_empty() && !(c2 > 0.0)) {
        return Err(Error::NotPositiveDefinite(format!(
            "g-prior scaling constants must be positive (c1 = {c1}, c2 = {c2})"
        )));
    }
    let mut seen = vec![false; p];
    for &c in continuous.iter().chain(discrete) {
        if c >= p || seen[c] {
            return Err(Error::Config(format!("block columns must partition 0..{p}")));
        }
        seen[c] = true;
    }
    if let Some(row) = design.iter().find(|r| r.len() != p) {
        return Err(Error::Dimension { expected: p, got: row.len() });
    }

    let mut sigma = DMatrix::<f64>::zeros(p, p);
    for (cols, c, name) in [(continuous, c1, "continuous"), (discrete, c2, "discrete")] {
        if cols.is_empty() {
            continue;
        }
        let inv = block_inverse(design, cols, name)?;
        for (a, &ca) in cols.iter().enumerate() {
            for (b, &cb) in cols.iter().enumerate() {
                sigma[(ca, cb)] = c * inv[(a, b)];
            }
        }
    }
    sigma = (&sigma + sigma.transpose()) * 0.5;
    if sigma.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite("g-prior covariance failed Cholesky".into()));
    }
    Ok(sigma)
}

/// Ranges the prior-predictive stick variables and correlations must respect.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GPriorTargets {
    pub stick_range: [f64; 2],
    pub rho_lower: f64,
    /// Lower and upper prior-predictive quantile levels checked against the ranges.
    pub levels: [f64; 2],
    pub draws: usize,
    pub seed: u64,
}

impl Default for GPriorTargets {
    fn default() -> Self {
        Self { stick_range: [0.02, 0.99], rho_lower: -0.70, levels: [0.025, 0.975], draws: 2000, seed: 20_170_101 }
    }
}

/// Result of [`calibrate_gprior`]: the largest admissible scaling constant for
/// the stick-variable and the correlation covariances, with the covariances.
#[derive(Clone, Debug)]
pub struct GPriorCalibration {
    pub c_v: f64,
    pub c_rho: f64,
    pub sigma_v: DMatrix<f64>,
    pub sigma_rho: DMatrix<f64>,
    /// Prior-predictive quantiles of v(x) at the chosen `c_v`.
    pub v_quantiles: [f64; 2],
    /// Prior-predictive lower quantile of ρ(x) at the chosen `c_rho`.
    pub rho_quantile: f64,
}

fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Chooses a common g-prior scale `c` (c1 = c2 = c) separately for Σ^v and
/// Σ^ρ, as large as possible while prior-predictive quantiles of v(x) and ρ(x)
/// over the observed design rows stay within `targets`.
///
/// With β = √c · L z, every linear predictor scales with √c, so for a fixed
/// set of standard-normal draws the admissible `c` is found in closed form.
pub fn calibrate_gprior(
    design: &[Vec<f64>],
    continuous: &[usize],
    discrete: &[usize],
    targets: &GPriorTargets,
) -> Result<GPriorCalibration> {
    let [v_lo, v_hi] = targets.stick_range;
    let [q_lo, q_hi] = targets.levels;
    if !(0.0 < v_lo && v_lo < 0.5 && 0.5 < v_hi && v_hi < 1.0) {
        return Err(Error::Config("stick range must straddle 0.5 inside (0, 1)".into()));
    }
    if !(-1.0 < targets.rho_lower && targets.rho_lower < 1.0) {
        return Err(Error::Config("rho lower bound must lie in (-1, 1)".into()));
    }
    if !(0.0 < q_lo && q_lo < q_hi && q_hi < 1.0) || targets.draws == 0 || design.is_empty() {
        return Err(Error::Config("invalid prior-predictive search settings".into()));
    }

    let unit = gprior_covariance(design, continuous, discrete, 1.0, 1.0)?;
    let l = unit.clone().cholesky().expect("checked SPD").l();
    let p = unit.nrows();
    let mut rng = RngStream::new(targets.seed, 0);
    let mut eta = Vec::with_capacity(targets.draws * design.len());
    for _ in 0..targets.draws {
        let z = DVector::<f64>::from_fn(p, |_, _| StandardNormal.sample(&mut rng));
        let beta = &l * z;
        for row in design {
            eta.push(row.iter().zip(beta.iter()).map(|(x, b)| x * b).sum::<f64>());
        }
    }
    let mut abs_eta: Vec<f64> = eta.iter().map(|e| e.abs()).collect();
    eta.sort_by(f64::total_cmp);
    abs_eta.sort_by(f64::total_cmp);

    let lower = quantile_type7(&eta, q_lo);
    let upper = quantile_type7(&eta, q_hi);
    let mut root_cv = f64::INFINITY;
    if lower < 0.0 {
        root_cv = root_cv.min(logit(v_lo) / lower);
    }
    if upper > 0.0 {
        root_cv = root_cv.min(logit(v_hi) / upper);
    }
    // ρ = 2/(|η|+1) − 1 falls with |η|, so its lower quantile is set by the
    // upper quantile of |η|.
    let abs_upper = quantile_type7(&abs_eta, q_hi);
    let eta_max = 2.0 / (targets.rho_lower + 1.0) - 1.0;
    let root_crho = if abs_upper > 0.0 { eta_max / abs_upper } else { f64::INFINITY };
    if !root_cv.is_finite() || !root_crho.is_finite() {
        return Err(Error::Numerical("prior-predictive linear predictors are degenerate".into()));
    }

    let c_v = root_cv * root_cv;
    let c_rho = root_crho * root_crho;
    Ok(GPriorCalibration {
        c_v,
        c_rho,
        sigma_v: &unit * c_v,
        sigma_rho: &unit * c_rho,
        v_quantiles: [logistic(root_cv * lower), logistic(root_cv * upper)],
        rho_quantile: 2.0 / (root_crho * abs_upper + 1.0) - 1.0,
    })
}
