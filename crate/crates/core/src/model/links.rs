use crate::copula::RHO_CLAMP_EPS;
use crate::real::{show, Real};
use crate::{Error, Result};

#[inline]
pub(crate) fn dot<T: Real>(x: &[T], beta: &[T]) -> T {
    x.iter().zip(beta).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

fn check_dims<T>(x: &[T], beta: &[T]) -> Result<()> {
    if x.len() != beta.len() {
        return Err(Error::Dimension { expected: x.len(), got: beta.len() });
    }
    Ok(())
}

/// Logistic function kept strictly inside (0, 1).
#[inline]
pub(crate) fn logistic<T: Real>(t: T) -> T {
    let v = if t >= T::zero() {
        T::one() / (T::one() + (-t).exp())
    } else {
        let e = t.exp();
        e / (T::one() + e)
    };
    v.max(T::min_positive_value()).min(T::one() - T::epsilon() * T::lit(0.5))
}

/// ρ = 2/(|η| + 1) − 1, written as (1 − |η|)/(1 + |η|) and clamped to
/// [−1 + ε, 1 − ε].
#[inline]
pub(crate) fn rho_link<T: Real>(eta: T) -> T {
    let a = eta.abs();
    let bound = T::one() - T::lit(RHO_CLAMP_EPS);
    if a.is_infinite() {
        return -bound;
    }
    ((T::one() - a) / (T::one() + a)).max(-bound).min(bound)
}

/// Stick variable v(x) = logistic(x'β).
pub fn v_of_x<T: Real>(x: &[T], beta: &[T]) -> Result<T> {
    check_dims(x, beta)?;
    Ok(logistic(dot(x, beta)))
}

/// Component correlation ρ(x) = 2/(|x'β| + 1) − 1, clamped away from ±1.
pub fn rho_of_x<T: Real>(x: &[T], beta: &[T]) -> Result<T> {
    check_dims(x, beta)?;
    Ok(rho_link(dot(x, beta)))
}

/// Writes the N = v.len() + 1 truncated stick-breaking weights into `out`;
/// the last weight is the remainder Π(1 − v_l).
#[inline]
pub(crate) fn stick_weights_into<T: Real>(v: &[T], out: &mut [T]) {
    let mut rest = T::one();
    for (w, &vj) in out.iter_mut().zip(v) {
        *w = rest * vj;
        rest = rest * (T::one() - vj);
    }
    out[v.len()] = rest;
}

/// Truncated stick-breaking weights from N − 1 stick variables:
/// w_j = v_j Π_{l<j}(1 − v_l) for j < N and w_N = Π_{l<N}(1 − v_l).
pub fn stick_weights<T: Real>(v: &[T]) -> Result<Vec<T>> {
    if let Some(bad) = v.iter().find(|&&vj| !(vj > T::zero() && vj < T::one())) {
        return Err(Error::domain(format!("stick variable {} is not inside (0, 1)", show(*bad))));
    }
    let mut w = vec![T::zero(); v.len() + 1];
    stick_weights_into(v, &mut w);
    Ok(w)
}
