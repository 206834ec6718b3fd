//! Bivariate normal CDF after Genz's BVND, itself a double-precision revision
//! of the Drezner–Wesolowsky method: Gauss–Legendre quadrature of Plackett's
//! identity for |ρ| < 0.925 and an asymptotic expansion around |ρ| = 1 above.

use super::normal::norm_cdf;
use crate::real::{show, Real};
use crate::{Error, Result};

// (weight, abscissa) pairs on [-1, 0]; each abscissa is used at ±x.
const GL6: [(f64, f64); 3] = [
    (0.1713244923791705, -0.9324695142031522),
    (0.3607615730481384, -0.6612093864662647),
    (0.4679139345726904, -0.2386191860831970),
];
const GL12: [(f64, f64); 6] = [
    (0.4717533638651177e-1, -0.9815606342467191),
    (0.1069393259953183, -0.9041172563704750),
    (0.1600783285433464, -0.7699026741943050),
    (0.2031674267230659, -0.5873179542866171),
    (0.2334925365383547, -0.3678314989981802),
    (0.2491470458134029, -0.1252334085114692),
];
const GL20: [(f64, f64); 10] = [
    (0.1761400713915212e-1, -0.9931285991850949),
    (0.4060142980038694e-1, -0.9639719272779138),
    (0.6267204833410906e-1, -0.9122344282513259),
    (0.8327674157670475e-1, -0.8391169718222188),
    (0.1019301198172404, -0.7463319064601508),
    (0.1181945319615184, -0.6360536807265150),
    (0.1316886384491766, -0.5108670019508271),
    (0.1420961093183821, -0.3737060887154196),
    (0.1491729864726037, -0.2277858511416451),
    (0.1527533871307259, -0.7652652113349733e-1),
];

fn rule(abs_r: f64) -> &'static [(f64, f64)] {
    if abs_r < 0.3 {
        &GL6
    } else if abs_r < 0.75 {
        &GL12
    } else {
        &GL20
    }
}

/// P(X > h, Y > k) for a standard bivariate normal with correlation `r`.
fn bvn_upper<T: Real>(h: T, k: T, r: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let abs_r = r.abs();
    let quad = rule(show(abs_r));
    let mut hk = h * k;

    if abs_r < T::lit(0.925) {
        let mut bvn = T::zero();
        if abs_r > T::zero() {
            let hs = (h * h + k * k) * half;
            let asr = r.asin();
            for &(w, x) in quad {
                let (w, x) = (T::lit(w), T::lit(x));
                for s in [x, -x] {
                    let sn = (asr * (s + one) * half).sin();
                    bvn = bvn + w * ((sn * hk - hs) / (one - sn * sn)).exp();
                }
            }
            bvn = bvn * asr / (two * T::TAU());
        }
        return bvn + norm_cdf(-h) * norm_cdf(-k);
    }

    let mut k = k;
    if r < T::zero() {
        k = -k;
        hk = -hk;
    }
    let mut bvn = T::zero();
    if abs_r < one {
        let a2 = (one - r) * (one + r);
        let mut a = a2.sqrt();
        let b2 = (h - k) * (h - k);
        let c = (T::lit(4.0) - hk) / T::lit(8.0);
        let d = (T::lit(12.0) - hk) / T::lit(16.0);
        let five = T::lit(5.0);
        let three = T::lit(3.0);
        bvn = a * (-(b2 / a2 + hk) * half).exp()
            * (one - c * (b2 - a2) * (one - d * b2 / five) / three + c * d * a2 * a2 / five);
        if hk > T::lit(-160.0) {
            let b = b2.sqrt();
            bvn = bvn
                - (-hk * half).exp()
                    * T::TAU().sqrt()
                    * norm_cdf(-b / a)
                    * b
                    * (one - c * b2 * (one - d * b2 / five) / three);
        }
        a = a * half;
        for &(w, x) in quad {
            let (w, x) = (T::lit(w), T::lit(x));
            for s in [x, -x] {
                let xs = (a * (s + one)) * (a * (s + one));
                let rs = (one - xs).sqrt();
                let expo = -(b2 / xs + hk) * half;
                // exp(expo) underflows long before the bracket matters.
                if expo > T::lit(-700.0) {
                    bvn = bvn
                        + a * w
                            * expo.exp()
                            * ((-hk * (one - rs) / (two * (one + rs))).exp() / rs
                                - (one + c * xs * (one + d * xs)));
                }
            }
        }
        bvn = -bvn / T::TAU();
    }
    if r > T::zero() {
        bvn + norm_cdf(-h.max(k))
    } else {
        let mut out = -bvn;
        if k > h {
            if h < T::zero() {
                out = out + norm_cdf(k) - norm_cdf(h);
            } else {
                out = out + norm_cdf(-h) - norm_cdf(-k);
            }
        }
        out
    }
}

/// Φ₂(z1, z2; ρ) without validation, exactly symmetric in (z1, z2).
#[inline]
pub(crate) fn bvn_lower<T: Real>(z1: T, z2: T, rho: T) -> T {
    let (a, b) = if z1 <= z2 { (z1, z2) } else { (z2, z1) };
    let p = bvn_upper(-a, -b, rho);
    p.max(T::zero()).min(T::one())
}

/// Bivariate standard normal CDF P(Z1 ≤ z1, Z2 ≤ z2) with correlation `rho`.
pub fn bivariate_normal_cdf<T: Real>(z1: T, z2: T, rho: T) -> Result<T> {
    if !(rho.abs() < T::one()) {
        return Err(Error::domain(format!(
            "bivariate_normal_cdf: |rho| = {} must be < 1",
            show(rho.abs())
        )));
    }
    if !z1.is_finite() || !z2.is_finite() {
        return Err(Error::domain("bivariate_normal_cdf: non-finite limit"));
    }
    Ok(bvn_lower(z1, z2, rho))
}
