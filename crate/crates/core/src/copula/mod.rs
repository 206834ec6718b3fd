//! Bivariate copulas: Gaussian densities and CDFs, Kendall's tau identities,
//! samplers for the Gaussian, Student-t and Gumbel families, and empirical
//! concordance estimators.

mod gaussian;
mod sampling;
mod tau;

pub use gaussian::{gaussian_copula_cdf, gaussian_copula_logdensity, GaussianScores};
pub use sampling::{sample_gaussian_copula, sample_gumbel_copula, sample_t_copula};
pub use tau::{
    concordance_tau, elliptical_tau, gumbel_tau, kendall_tau, mixture_tau, ConcordanceEstimate,
};

use crate::real::{show, Real};
use crate::{Error, Result};

/// Distance kept between any evaluated correlation and ±1.
pub const RHO_CLAMP_EPS: f64 = 1e-6;

/// Clamps a correlation into `[-1 + ε, 1 - ε]` with ε = [`RHO_CLAMP_EPS`].
#[inline]
pub fn clamp_rho<T: Real>(rho: T) -> T {
    let bound = T::one() - T::lit(RHO_CLAMP_EPS);
    rho.max(-bound).min(bound)
}

/// A point strictly inside the unit square.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitPair<T> {
    pub u1: T,
    pub u2: T,
}

impl<T: Real> UnitPair<T> {
    pub fn new(u1: T, u2: T) -> Result<Self> {
        let inside = |u: T| u > T::zero() && u < T::one();
        if !inside(u1) || !inside(u2) {
            return Err(Error::domain(format!(
                "unit pair ({}, {}) must lie strictly inside (0,1)^2",
                show(u1),
                show(u2)
            )));
        }
        Ok(Self { u1, u2 })
    }

    /// Pulls a sampled coordinate off the boundary it can hit through rounding.
    pub(crate) fn from_sample(u1: T, u2: T) -> Self {
        let lo = T::min_positive_value();
        let hi = T::one() - T::epsilon();
        Self { u1: u1.max(lo).min(hi), u2: u2.max(lo).min(hi) }
    }

    pub fn swapped(self) -> Self {
        Self { u1: self.u2, u2: self.u1 }
    }
}

/// Correlation of a bivariate Gaussian copula, stored clamped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianCopulaParam<T> {
    rho: T,
}

impl<T: Real> GaussianCopulaParam<T> {
    /// Accepts any `rho` in [-1, 1] and clamps it away from the endpoints.
    pub fn new(rho: T) -> Result<Self> {
        if !(rho.abs() <= T::one()) {
            return Err(Error::domain(format!("correlation {} outside [-1, 1]", show(rho))));
        }
        Ok(Self { rho: clamp_rho(rho) })
    }

    pub fn rho(&self) -> T {
        self.rho
    }
}

/// A finite mixture of Gaussian copulas, Σ_j w_j c_G(· | ρ_j).
#[derive(Clone, Debug, PartialEq)]
pub struct MixtureOfGaussianCopulas<T> {
    weights: Vec<T>,
    rhos: Vec<T>,
}

impl<T: Real> MixtureOfGaussianCopulas<T> {
    pub const WEIGHT_SUM_TOL: f64 = 1e-12;

    pub fn new(weights: Vec<T>, rhos: Vec<T>) -> Result<Self> {
        if weights.len() != rhos.len() {
            return Err(Error::Dimension { expected: weights.len(), got: rhos.len() });
        }
        if weights.is_empty() {
            return Err(Error::Invariant("mixture needs at least one component".into()));
        }
        if weights.iter().any(|w| !(*w >= T::zero()) || !w.is_finite()) {
            return Err(Error::Invariant("mixture weights must be finite and nonnegative".into()));
        }
        if rhos.iter().any(|r| !(r.abs() <= T::one())) {
            return Err(Error::Invariant("mixture correlations must lie in [-1, 1]".into()));
        }
        let total = weights.iter().fold(T::zero(), |a, &w| a + w);
        let tol = T::lit(Self::WEIGHT_SUM_TOL).max(T::epsilon() * T::lit(8.0) * T::from_usize(weights.len()).unwrap());
        if (total - T::one()).abs() > tol {
            return Err(Error::Invariant(format!(
                "mixture weights sum to {} instead of 1",
                show(total)
            )));
        }
        Ok(Self { weights, rhos })
    }

    pub fn single(rho: T) -> Result<Self> {
        Self::new(vec![T::one()], vec![rho])
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn rhos(&self) -> &[T] {
        &self.rhos
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// log Σ_j w_j c_G(u | ρ_j), evaluated with log-sum-exp.
    pub fn log_density(&self, u: UnitPair<T>) -> Result<T> {
        let scores = GaussianScores::new(u);
        let terms: Vec<T> = self
            .weights
            .iter()
            .zip(&self.rhos)
            .map(|(&w, &r)| w.ln() + scores.log_density(clamp_rho(r)))
            .collect();
        Ok(log_sum_exp(&terms))
    }
}

/// log Σ exp(x_i), −∞ for an empty or all −∞ input.
pub fn log_sum_exp<T: Real>(xs: &[T]) -> T {
    let m = xs.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
    if m == T::neg_infinity() || !m.is_finite() {
        return m;
    }
    m + xs.iter().fold(T::zero(), |a, &x| a + (x - m).exp()).ln()
}
