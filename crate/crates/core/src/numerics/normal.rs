use crate::real::{show, Real};
use crate::{Error, Result};

/// Φ(z) without input validation.
#[inline]
pub(crate) fn norm_cdf<T: Real>(z: T) -> T {
    T::lit(0.5) * (-z * T::FRAC_1_SQRT_2()).erfc()
}

/// Standard normal CDF.
///
/// Evaluated through `erfc` on both sides of zero, so the lower tail keeps
/// full relative precision (Φ(-8) ≈ 6.2e-16 is returned, not rounded to 0).
pub fn std_normal_cdf<T: Real>(z: T) -> Result<T> {
    if !z.is_finite() {
        return Err(Error::domain(format!("std_normal_cdf: non-finite input {}", show(z))));
    }
    Ok(norm_cdf(z))
}

// Acklam's rational approximation, relative error 1.15e-9 before refinement.
const A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];
const P_LOW: f64 = 0.02425;

fn horner<T: Real>(coef: &[f64], x: T) -> T {
    coef.iter().fold(T::zero(), |acc, &c| acc * x + T::lit(c))
}

fn acklam<T: Real>(p: T) -> T {
    let one = T::one();
    let p_low = T::lit(P_LOW);
    if p < p_low {
        let q = (T::lit(-2.0) * p.ln()).sqrt();
        horner(&C, q) / (horner(&D, q) * q + one)
    } else if p <= one - p_low {
        let q = p - T::lit(0.5);
        let r = q * q;
        horner(&A, r) * q / (horner(&B, r) * r + one)
    } else {
        let q = (T::lit(-2.0) * (one - p).ln()).sqrt();
        -horner(&C, q) / (horner(&D, q) * q + one)
    }
}

/// Φ⁻¹(p) without input validation; `p` must lie in (0, 1).
pub(crate) fn norm_quantile<T: Real>(p: T) -> T {
    let x = acklam(p);
    // One Halley step on Φ(x) - p.
    let e = if p < T::lit(0.5) {
        norm_cdf(x) - p
    } else {
        (T::one() - p) - norm_cdf(-x)
    };
    let u = e * (T::TAU()).sqrt() * (x * x * T::lit(0.5)).exp();
    let refined = x - u / (T::one() + x * u * T::lit(0.5));
    if refined.is_finite() {
        refined
    } else {
        x
    }
}

/// Standard normal quantile function.
pub fn std_normal_quantile<T: Real>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::domain(format!(
            "std_normal_quantile: p = {} outside (0, 1)",
            show(p)
        )));
    }
    Ok(norm_quantile(p))
}
