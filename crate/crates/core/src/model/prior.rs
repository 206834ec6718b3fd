use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{DdpmcState, LdvrState, ModelState};
use crate::data::GPriorCalibration;
use crate::{Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// Prior on the LDVR baseline: β ~ N(mu, sigma), sticks ~ Beta(1, alpha).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdvrPrior {
    pub mu: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
    pub alpha: f64,
}

impl Default for LdvrPrior {
    fn default() -> Self {
        Self { mu: vec![0.0; 2], sigma: scaled_identity(2, 2.25), alpha: 1.0 }
    }
}

/// Gaussian priors β^v_j ~ N(mu_v, sigma_v) and β^ρ_j ~ N(mu_rho, sigma_rho),
/// plus the LDVR prior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub mu_v: Vec<f64>,
    pub sigma_v: Vec<Vec<f64>>,
    pub mu_rho: Vec<f64>,
    pub sigma_rho: Vec<Vec<f64>>,
    #[serde(default)]
    pub ldvr: LdvrPrior,
}

fn scaled_identity(p: usize, s: f64) -> Vec<Vec<f64>> {
    (0..p).map(|i| (0..p).map(|j| if i == j { s } else { 0.0 }).collect()).collect()
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

impl PriorSpec {
    /// Zero means and covariance `var · I_p` for both coefficient families.
    pub fn isotropic(p: usize, var: f64) -> Self {
        Self {
            mu_v: vec![0.0; p],
            sigma_v: scaled_identity(p, var),
            mu_rho: vec![0.0; p],
            sigma_rho: scaled_identity(p, var),
            ldvr: LdvrPrior::default(),
        }
    }

    /// The simulation-study prior: zero means, covariance 2.25 · I_p.
    pub fn simulation(p: usize) -> Self {
        Self::isotropic(p, 2.25)
    }

    /// Zero means with the calibrated g-prior covariances.
    pub fn from_gprior(cal: &GPriorCalibration) -> Self {
        let p = cal.sigma_v.nrows();
        Self {
            mu_v: vec![0.0; p],
            sigma_v: rows(&cal.sigma_v),
            mu_rho: vec![0.0; p],
            sigma_rho: rows(&cal.sigma_rho),
            ldvr: LdvrPrior::default(),
        }
    }

    pub fn p(&self) -> usize {
        self.mu_rho.len()
    }

    /// Factorizes every covariance; fails unless all are SPD.
    pub fn prepare(&self) -> Result<PreparedPrior> {
        let ldvr_alpha = self.ldvr.alpha;
        if !(ldvr_alpha > 0.0) || !ldvr_alpha.is_finite() {
            return Err(Error::Config(format!("LDVR concentration {ldvr_alpha} must be positive")));
        }
        if self.ldvr.mu.len() != 2 {
            return Err(Error::Dimension { expected: 2, got: self.ldvr.mu.len() });
        }
        Ok(PreparedPrior {
            v: MvnPrior::new(&self.mu_v, &self.sigma_v, "sigma_v")?,
            rho: MvnPrior::new(&self.mu_rho, &self.sigma_rho, "sigma_rho")?,
            ldvr_beta: MvnPrior::new(&self.ldvr.mu, &self.ldvr.sigma, "ldvr.sigma")?,
            ldvr_alpha,
        })
    }
}

/// A multivariate normal with a cached Cholesky factor.
#[derive(Clone, Debug)]
pub struct MvnPrior {
    mu: DVector<f64>,
    chol: DMatrix<f64>,
    log_norm: f64,
}

impl MvnPrior {
    pub fn new(mu: &[f64], sigma: &[Vec<f64>], name: &str) -> Result<Self> {
        let p = mu.len();
        if sigma.len() != p || sigma.iter().any(|r| r.len() != p) {
            return Err(Error::Config(format!("{name} must be {p}×{p}")));
        }
        let m = DMatrix::from_fn(p, p, |i, j| sigma[i][j]);
        if (0..p).any(|i| (0..i).any(|j| (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * (1.0 + m[(i, j)].abs()))) {
            return Err(Error::NotPositiveDefinite(format!("{name} is not symmetric")));
        }
        let chol = m
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite(format!("{name} has no Cholesky factor")))?
            .l();
        let log_det: f64 = 2.0 * chol.diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Ok(Self {
            mu: DVector::from_column_slice(mu),
            chol,
            log_norm: -0.5 * (p as f64 * LN_2PI + log_det),
        })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mean(&self) -> &[f64] {
        self.mu.as_slice()
    }

    /// Marginal standard deviations.
    pub fn sds(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.chol.row(i).norm()).collect()
    }

    pub fn log_density(&self, x: &[f64]) -> f64 {
        let d = DVector::from_column_slice(x) - &self.mu;
        let z = self.chol.solve_lower_triangular(&d).expect("factor has positive diagonal");
        self.log_norm - 0.5 * z.norm_squared()
    }

    /// μ + L z for a vector of standard-normal draws `z`.
    pub fn transform(&self, z: &[f64]) -> Vec<f64> {
        (&self.mu + &self.chol * DVector::from_column_slice(z)).as_slice().to_vec()
    }
}

/// A [`PriorSpec`] with factorized covariances.
#[derive(Clone, Debug)]
pub struct PreparedPrior {
    pub v: MvnPrior,
    pub rho: MvnPrior,
    pub ldvr_beta: MvnPrior,
    pub ldvr_alpha: f64,
}

impl PreparedPrior {
    pub fn p(&self) -> usize {
        self.rho.dim()
    }

    /// log Beta(1, α) density of one stick variable.
    pub fn log_stick(&self, v: f64) -> f64 {
        self.ldvr_alpha.ln() + (self.ldvr_alpha - 1.0) * (-v).ln_1p()
    }

    pub fn log_prior_ddpmc(&self, s: &DdpmcState<f64>) -> Result<f64> {
        if s.p() != self.p() || self.v.dim() != self.p() {
            return Err(Error::Dimension { expected: self.p(), got: s.p() });
        }
        Ok(s.beta_v().iter().map(|b| self.v.log_density(b)).sum::<f64>()
            + s.beta_rho().iter().map(|b| self.rho.log_density(b)).sum::<f64>())
    }

    pub fn log_prior_ldvr(&self, s: &LdvrState<f64>) -> f64 {
        self.ldvr_beta.log_density(&s.beta()) + s.v().iter().map(|&v| self.log_stick(v)).sum::<f64>()
    }

    pub fn log_prior(&self, s: &ModelState<f64>) -> Result<f64> {
        match s {
            ModelState::Ddpmc(d) => self.log_prior_ddpmc(d),
            ModelState::Ldvr(l) => Ok(self.log_prior_ldvr(l)),
        }
    }
}

/// Log prior density of a state.
pub fn log_prior(state: &ModelState<f64>, prior: &PriorSpec) -> Result<f64> {
    prior.prepare()?.log_prior(state)
}
