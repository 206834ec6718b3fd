use super::{MixtureOfGaussianCopulas, UnitPair};
use crate::numerics::RngStream;
use crate::real::{show, Real};
use crate::{Error, Result};

/// Kendall's tau of an elliptical copula with correlation `rho`: (2/π) asin ρ.
pub fn elliptical_tau<T: Real>(rho: T) -> Result<T> {
    if !(rho.abs() <= T::one()) {
        return Err(Error::domain(format!("elliptical_tau: |rho| = {} > 1", show(rho.abs()))));
    }
    Ok(T::FRAC_2_PI() * rho.asin())
}

/// Kendall's tau of a finite Gaussian-copula mixture in closed form.
///
/// For independent draws X ~ c_G(ρ_i) and Y ~ c_G(ρ_j) the normal-score
/// difference X − Y is bivariate normal with correlation (ρ_i + ρ_j)/2, hence
/// τ = (2/π) Σ_i Σ_j w_i w_j asin((ρ_i + ρ_j)/2).
pub fn mixture_tau<T: Real>(m: &MixtureOfGaussianCopulas<T>) -> T {
    let w = m.weights();
    let r = m.rhos();
    let half = T::lit(0.5);
    let mut acc = T::zero();
    for i in 0..w.len() {
        if w[i] == T::zero() {
            continue;
        }
        acc = acc + w[i] * w[i] * r[i].asin();
        let mut off = T::zero();
        for j in (i + 1)..w.len() {
            off = off + w[j] * ((r[i] + r[j]) * half).asin();
        }
        acc = acc + T::lit(2.0) * w[i] * off;
    }
    (T::FRAC_2_PI() * acc).max(-T::one()).min(T::one())
}

/// Kendall's tau of the Gumbel copula, 1 − 1/α.
pub fn gumbel_tau<T: Real>(alpha: T) -> Result<T> {
    if !(alpha >= T::one()) || !alpha.is_finite() {
        return Err(Error::domain(format!("gumbel_tau: alpha = {} must be >= 1", show(alpha))));
    }
    Ok(T::one() - alpha.recip())
}

/// Monte Carlo estimate of a copula's Kendall's tau from independent pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcordanceEstimate {
    pub tau: f64,
    pub std_error: f64,
    pub pairs: usize,
}

/// Estimates τ = 2 P(concordant) − 1 from `pairs` independent pairs of draws.
pub fn concordance_tau<F>(pairs: usize, rng: &mut RngStream, mut sampler: F) -> Result<ConcordanceEstimate>
where
    F: FnMut(&mut RngStream) -> Result<UnitPair<f64>>,
{
    if pairs == 0 {
        return Err(Error::domain("concordance_tau: need at least one pair"));
    }
    let mut concordant = 0usize;
    for _ in 0..pairs {
        let a = sampler(rng)?;
        let b = sampler(rng)?;
        if (a.u1 - b.u1) * (a.u2 - b.u2) > 0.0 {
            concordant += 1;
        }
    }
    let p = concordant as f64 / pairs as f64;
    Ok(ConcordanceEstimate {
        tau: 2.0 * p - 1.0,
        std_error: 2.0 * (p * (1.0 - p) / pairs as f64).sqrt(),
        pairs,
    })
}

/// Sample Kendall's tau (tau-a) in O(n log n) by counting inversions.
///
/// Meant for continuous data; tied pairs count as concordant.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension { expected: x.len(), got: y.len() });
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::domain("kendall_tau: need at least two observations"));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));
    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let mut buf = vec![0.0; n];
    let discordant = count_inversions(&mut ys, &mut buf);
    let total = n as f64 * (n as f64 - 1.0) / 2.0;
    Ok(1.0 - 2.0 * discordant as f64 / total)
}

fn count_inversions(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = {
        let (l, r) = v.split_at_mut(mid);
        count_inversions(l, &mut buf[..mid]) + count_inversions(r, &mut buf[mid..])
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            inv += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::sample_gaussian_copula;
    use approx::assert_abs_diff_eq;

    #[test]
    fn elliptical_examples() {
        assert_eq!(elliptical_tau(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(elliptical_tau(0.01).unwrap(), 0.006366, epsilon = 1e-6);
        assert_abs_diff_eq!(elliptical_tau(0.99).unwrap(), 0.9098, epsilon = 1e-4);
        assert_abs_diff_eq!(elliptical_tau(0.5).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(elliptical_tau(1.0).unwrap(), 1.0);
        assert!(elliptical_tau(1.0001).is_err());
        for r in [0.1, 0.45, 0.93] {
            assert_eq!(elliptical_tau(-r).unwrap(), -elliptical_tau(r).unwrap());
        }
    }

    #[test]
    fn elliptical_matches_monte_carlo() {
        let mut rng = RngStream::new(101, 0);
        let est = concordance_tau(500_000, &mut rng, |r| sample_gaussian_copula(0.5, r)).unwrap();
        assert!((est.tau - 1.0 / 3.0).abs() < 0.003, "{est:?}");
    }

    #[test]
    fn mixture_examples() {
        let single = MixtureOfGaussianCopulas::single(0.5).unwrap();
        assert_abs_diff_eq!(mixture_tau(&single), 1.0 / 3.0, epsilon = 1e-15);
        for r in [0.1, 0.5, 0.97] {
            let m = MixtureOfGaussianCopulas::new(vec![0.5, 0.5], vec![r, -r]).unwrap();
            assert_abs_diff_eq!(mixture_tau(&m), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn mixture_matches_monte_carlo() {
        let m = MixtureOfGaussianCopulas::new(vec![0.3, 0.7], vec![0.9, -0.2]).unwrap();
        let mut rng = RngStream::new(5, 2);
        let est = concordance_tau(1_000_000, &mut rng, |r| {
            let rho = if r.open01() < 0.3 { 0.9 } else { -0.2 };
            sample_gaussian_copula(rho, r)
        })
        .unwrap();
        assert!((mixture_tau(&m) - est.tau).abs() < 0.003, "{} vs {est:?}", mixture_tau(&m));
    }

    #[test]
    fn gumbel_examples() {
        assert_eq!(gumbel_tau(1.0).unwrap(), 0.0);
        assert_eq!(gumbel_tau(2.0).unwrap(), 0.5);
        assert_eq!(gumbel_tau(4.0).unwrap(), 0.75);
        assert!(gumbel_tau(0.99).is_err());
    }

    #[test]
    fn kendall_tau_small_cases() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(kendall_tau(&x, &x).unwrap(), 1.0);
        assert_eq!(kendall_tau(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0);
        // 5 concordant, 1 discordant
        assert_abs_diff_eq!(kendall_tau(&x, &[1.0, 3.0, 2.0, 4.0]).unwrap(), 4.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn kendall_tau_matches_quadratic_count() {
        let mut rng = RngStream::new(3, 0);
        let x: Vec<f64> = (0..300).map(|_| rng.open01()).collect();
        let y: Vec<f64> = x.iter().map(|v| v + 0.5 * rng.open01()).collect();
        let mut s = 0i64;
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                s += ((x[i] - x[j]) * (y[i] - y[j])).signum() as i64;
            }
        }
        let brute = s as f64 / (300.0 * 299.0 / 2.0);
        assert_abs_diff_eq!(kendall_tau(&x, &y).unwrap(), brute, epsilon = 1e-12);
    }
}
