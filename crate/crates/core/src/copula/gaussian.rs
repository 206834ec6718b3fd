use super::{clamp_rho, GaussianCopulaParam, UnitPair};
use crate::numerics::{bvn_lower, norm_quantile};
use crate::real::Real;
use crate::Result;

/// Normal scores of a unit pair, precomputed for repeated density evaluation.
#[derive(Clone, Copy, Debug)]
pub struct GaussianScores<T> {
    pub z1: T,
    pub z2: T,
    /// z1² + z2²
    pub sum_sq: T,
    /// z1 z2
    pub cross: T,
}

impl<T: Real> GaussianScores<T> {
    pub fn new(u: UnitPair<T>) -> Self {
        let z1 = norm_quantile(u.u1);
        let z2 = norm_quantile(u.u2);
        Self { z1, z2, sum_sq: z1 * z1 + z2 * z2, cross: z1 * z2 }
    }

    /// log c_G at an already clamped correlation.
    #[inline]
    pub fn log_density(&self, rho: T) -> T {
        let one = T::one();
        let det = (one - rho) * (one + rho);
        let quad = (rho * rho * self.sum_sq - (rho + rho) * self.cross) / det;
        -T::lit(0.5) * (det.ln() + quad)
    }

    /// Upper bound of log c_G over all correlations with |ρ| ≤ 1 − ε.
    pub fn log_density_bound(&self) -> T {
        let eps = T::lit(super::RHO_CLAMP_EPS);
        let det_min = eps * (T::lit(2.0) - eps);
        T::lit(0.5) * (self.sum_sq - det_min.ln())
    }
}

/// Log density of the bivariate Gaussian copula,
/// −½ log(1−ρ²) − ½ zᵀ(Σ_ρ⁻¹ − I)z with z the normal scores of `u`.
pub fn gaussian_copula_logdensity<T: Real>(u: UnitPair<T>, rho: T) -> Result<T> {
    let rho = GaussianCopulaParam::new(rho)?.rho();
    let u = UnitPair::new(u.u1, u.u2)?;
    Ok(GaussianScores::new(u).log_density(rho))
}

/// Gaussian copula CDF Φ₂(Φ⁻¹(u1), Φ⁻¹(u2); ρ).
pub fn gaussian_copula_cdf<T: Real>(u: UnitPair<T>, rho: T) -> Result<T> {
    let rho = GaussianCopulaParam::new(rho)?.rho();
    let u = UnitPair::new(u.u1, u.u2)?;
    Ok(bvn_lower(norm_quantile(u.u1), norm_quantile(u.u2), clamp_rho(rho)))
}
