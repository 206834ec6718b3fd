use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, StandardNormal};

use super::UnitPair;
use crate::numerics::{norm_cdf, t_cdf, RngStream};
use crate::real::{show, Real};
use crate::{Error, Result};

fn check_rho<T: Real>(rho: T) -> Result<()> {
    if !(rho.abs() < T::one()) {
        return Err(Error::domain(format!("copula sampler: |rho| = {} must be < 1", show(rho.abs()))));
    }
    Ok(())
}

fn correlated_normals<T: Real>(rho: T, rng: &mut RngStream) -> (T, T) {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    let (a, b) = (T::lit(a), T::lit(b));
    let s = ((T::one() - rho) * (T::one() + rho)).sqrt();
    (a, rho * a + s * b)
}

/// One draw from the bivariate Gaussian copula.
pub fn sample_gaussian_copula<T: Real>(rho: T, rng: &mut RngStream) -> Result<UnitPair<T>> {
    check_rho(rho)?;
    let (z1, z2) = correlated_normals(rho, rng);
    Ok(UnitPair::from_sample(norm_cdf(z1), norm_cdf(z2)))
}

/// One draw from the bivariate Student-t copula: T = Z/√(χ²_ν/ν), U_i = F_ν(T_i).
pub fn sample_t_copula<T: Real>(rho: T, nu: T, rng: &mut RngStream) -> Result<UnitPair<T>> {
    check_rho(rho)?;
    if !(nu > T::zero()) || !nu.is_finite() {
        return Err(Error::domain(format!("t copula: nu = {} must be positive", show(nu))));
    }
    let (z1, z2) = correlated_normals(rho, rng);
    let chi = ChiSquared::new(show(nu)).map_err(|e| Error::domain(e.to_string()))?;
    let w = T::lit(chi.sample(rng)) / nu;
    let scale = w.sqrt().recip();
    Ok(UnitPair::from_sample(t_cdf(z1 * scale, nu), t_cdf(z2 * scale, nu)))
}

/// Positive stable variate with Laplace transform exp(−t^a), 0 < a ≤ 1
/// (Chambers–Mallows–Stuck / Kanter representation).
fn positive_stable<T: Real>(a: T, rng: &mut RngStream) -> T {
    let one = T::one();
    if a == one {
        return one;
    }
    let theta = T::PI() * T::lit(rng.open01());
    let w = T::lit(rng.sample::<f64, _>(Exp1));
    let left = (a * theta).sin() / theta.sin().powf(a.recip());
    let right = (((one - a) * theta).sin() / w).powf((one - a) / a);
    left * right
}

/// One draw from the Gumbel copula by the Marshall–Olkin frailty construction:
/// S positive stable(1/α), E_i ~ Exp(1), U_i = exp(−(E_i/S)^{1/α}).
pub fn sample_gumbel_copula<T: Real>(alpha: T, rng: &mut RngStream) -> Result<UnitPair<T>> {
    if !(alpha >= T::one()) || !alpha.is_finite() {
        return Err(Error::domain(format!("gumbel copula: alpha = {} must be >= 1", show(alpha))));
    }
    let inv = alpha.recip();
    let s = positive_stable(inv, rng);
    let e1 = T::lit(rng.sample::<f64, _>(Exp1));
    let e2 = T::lit(rng.sample::<f64, _>(Exp1));
    let gen = |e: T| (-(e / s).powf(inv)).exp();
    Ok(UnitPair::from_sample(gen(e1), gen(e2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::kendall_tau;

    const DRAWS: usize = 100_000;

    fn draws<F: FnMut(&mut RngStream) -> Result<UnitPair<f64>>>(seed: u64, mut f: F) -> (Vec<f64>, Vec<f64>) {
        let mut rng = RngStream::new(seed, 0);
        let mut a = Vec::with_capacity(DRAWS);
        let mut b = Vec::with_capacity(DRAWS);
        for _ in 0..DRAWS {
            let u = f(&mut rng).unwrap();
            assert!(u.u1 > 0.0 && u.u1 < 1.0 && u.u2 > 0.0 && u.u2 < 1.0);
            a.push(u.u1);
            b.push(u.u2);
        }
        (a, b)
    }

    /// Kolmogorov–Smirnov against U(0,1); 1% asymptotic critical value 1.628/√n.
    fn ks_uniform_passes(xs: &[f64]) -> bool {
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let d = v
            .iter()
            .enumerate()
            .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
            .fold(0.0, f64::max);
        d * n.sqrt() < 1.628
    }

    #[test]
    fn gaussian_sampler_tau_and_margins() {
        let (a, b) = draws(1, |r| sample_gaussian_copula(0.0, r));
        assert!(kendall_tau(&a, &b).unwrap().abs() < 0.01);
        let (a, b) = draws(2, |r| sample_gaussian_copula(0.5, r));
        assert!((kendall_tau(&a, &b).unwrap() - 1.0 / 3.0).abs() < 0.01);
        assert!(ks_uniform_passes(&a) && ks_uniform_passes(&b));
        let (a, b) = draws(3, |r| sample_gaussian_copula(-0.9, r));
        assert!(ks_uniform_passes(&a) && ks_uniform_passes(&b));
    }

    #[test]
    fn t_sampler_tau_is_df_invariant() {
        for (seed, nu) in [(4u64, 1.0), (5, 3.0), (6, 30.0)] {
            let (a, b) = draws(seed, |r| sample_t_copula(0.5, nu, r));
            assert!((kendall_tau(&a, &b).unwrap() - 1.0 / 3.0).abs() < 0.01, "nu = {nu}");
            assert!(ks_uniform_passes(&a) && ks_uniform_passes(&b));
        }
        let (a, b) = draws(7, |r| sample_t_copula(0.0, 3.0, r));
        assert!(kendall_tau(&a, &b).unwrap().abs() < 0.01);
    }

    #[test]
    fn gumbel_sampler_tau() {
        let (a, b) = draws(8, |r| sample_gumbel_copula(1.0, r));
        assert!(kendall_tau(&a, &b).unwrap().abs() < 0.01);
        let (a, b) = draws(9, |r| sample_gumbel_copula(2.0, r));
        assert!((kendall_tau(&a, &b).unwrap() - 0.5).abs() < 0.01);
        assert!(ks_uniform_passes(&a) && ks_uniform_passes(&b));
        let x: f64 = 2.0 / 3.0;
        let alpha = x * x * (1.0 - x) + 1.0;
        assert!((alpha - 1.148148).abs() < 1e-6);
        let (a, b) = draws(10, |r| sample_gumbel_copula(alpha, r));
        assert!((kendall_tau(&a, &b).unwrap() - 0.12903).abs() < 0.01);
        let (a, b) = draws(11, |r| sample_gumbel_copula(4.0, r));
        assert!((kendall_tau(&a, &b).unwrap() - 0.75).abs() < 0.01);
    }

    #[test]
    fn samplers_reject_bad_parameters() {
        let mut rng = RngStream::new(0, 0);
        assert!(sample_gaussian_copula(1.0, &mut rng).is_err());
        assert!(sample_t_copula(0.2, 0.0, &mut rng).is_err());
        assert!(sample_t_copula(-1.0, 3.0, &mut rng).is_err());
        assert!(sample_gumbel_copula(0.5, &mut rng).is_err());
    }

    #[test]
    fn samplers_are_deterministic() {
        let (a, _) = draws(12, |r| sample_t_copula(0.3, 3.0, r));
        let (b, _) = draws(12, |r| sample_t_copula(0.3, 3.0, r));
        assert_eq!(a, b);
    }
}
