use super::links::{dot, logistic, rho_link};
use crate::copula::{log_sum_exp, GaussianScores, MixtureOfGaussianCopulas};
use crate::data::PseudoDataset;
use crate::real::{show, Real};
use crate::{Error, Result};

/// Coefficients of a truncated DDPMC: N − 1 stick vectors β^v_j (the last
/// weight is the stick remainder) and N correlation vectors β^ρ_j.
#[derive(Clone, Debug, PartialEq)]
pub struct DdpmcState<T> {
    beta_v: Vec<Vec<T>>,
    beta_rho: Vec<Vec<T>>,
}

impl<T: Real> DdpmcState<T> {
    pub fn new(beta_v: Vec<Vec<T>>, beta_rho: Vec<Vec<T>>) -> Result<Self> {
        let n = beta_rho.len();
        if n < 2 {
            return Err(Error::Invariant(format!("truncation level must be at least 2, got {n}")));
        }
        if beta_v.len() != n - 1 {
            return Err(Error::Dimension { expected: n - 1, got: beta_v.len() });
        }
        let p = beta_rho[0].len();
        if p == 0 {
            return Err(Error::Invariant("coefficient vectors must be nonempty".into()));
        }
        for b in beta_v.iter().chain(&beta_rho) {
            if b.len() != p {
                return Err(Error::Dimension { expected: p, got: b.len() });
            }
            if b.iter().any(|c| !c.is_finite()) {
                return Err(Error::Invariant("coefficients must be finite".into()));
            }
        }
        Ok(Self { beta_v, beta_rho })
    }

    /// Every stick coefficient set to `v`, every correlation coefficient
    /// vector to `rho`.
    pub fn constant(n: usize, v: &[T], rho: &[T]) -> Result<Self> {
        Self::new(vec![v.to_vec(); n.saturating_sub(1)], vec![rho.to_vec(); n])
    }

    /// Truncation level N.
    pub fn n_components(&self) -> usize {
        self.beta_rho.len()
    }

    pub fn p(&self) -> usize {
        self.beta_rho[0].len()
    }

    pub fn beta_v(&self) -> &[Vec<T>] {
        &self.beta_v
    }

    pub fn beta_rho(&self) -> &[Vec<T>] {
        &self.beta_rho
    }

    pub(crate) fn beta_v_mut(&mut self, j: usize) -> &mut Vec<T> {
        &mut self.beta_v[j]
    }

    pub(crate) fn beta_rho_mut(&mut self, j: usize) -> &mut Vec<T> {
        &mut self.beta_rho[j]
    }

    /// Coefficients flattened as β^v_1, …, β^v_{N−1}, β^ρ_1, …, β^ρ_N.
    pub fn to_flat(&self) -> Vec<T> {
        self.beta_v.iter().chain(&self.beta_rho).flatten().copied().collect()
    }

    pub fn from_flat(n: usize, p: usize, flat: &[T]) -> Result<Self> {
        if n < 2 || p == 0 || flat.len() != (2 * n - 1) * p {
            return Err(Error::Dimension { expected: (2 * n.max(1) - 1) * p, got: flat.len() });
        }
        let mut chunks = flat.chunks(p).map(<[T]>::to_vec);
        let beta_v = chunks.by_ref().take(n - 1).collect();
        let beta_rho = chunks.collect();
        Self::new(beta_v, beta_rho)
    }

    /// Names matching [`to_flat`](Self::to_flat).
    pub fn field_names(n: usize, p: usize) -> Vec<String> {
        let mut names = Vec::with_capacity((2 * n - 1) * p);
        for j in 1..n {
            names.extend((0..p).map(|k| format!("beta_v[{j}][{k}]")));
        }
        for j in 1..=n {
            names.extend((0..p).map(|k| format!("beta_rho[{j}][{k}]")));
        }
        names
    }

    fn check_x(&self, x: &[T]) -> Result<()> {
        if x.len() != self.p() {
            return Err(Error::Dimension { expected: self.p(), got: x.len() });
        }
        Ok(())
    }

    /// Weights and correlations at `x`, without validation.
    pub(crate) fn fill_at(&self, x: &[T], weights: &mut [T], rhos: &mut [T]) {
        let mut rest = T::one();
        for (w, b) in weights.iter_mut().zip(&self.beta_v) {
            let v = logistic(dot(x, b));
            *w = rest * v;
            rest = rest * (T::one() - v);
        }
        weights[self.beta_v.len()] = rest;
        for (r, b) in rhos.iter_mut().zip(&self.beta_rho) {
            *r = rho_link(dot(x, b));
        }
    }
}

/// The Gaussian-copula mixture a DDPMC state implies at covariate row `x`.
pub fn ddpmc_mixture_at_x<T: Real>(state: &DdpmcState<T>, x: &[T]) -> Result<MixtureOfGaussianCopulas<T>> {
    state.check_x(x)?;
    let n = state.n_components();
    let mut w = vec![T::zero(); n];
    let mut r = vec![T::zero(); n];
    state.fill_at(x, &mut w, &mut r);
    MixtureOfGaussianCopulas::new(w, r)
}

/// Σ_i log Σ_j w_j(x_i) c_G(u_i | ρ_j(x_i)).
pub fn ddpmc_loglik<T: Real>(data: &PseudoDataset<T>, state: &DdpmcState<T>) -> Result<T> {
    if data.n() > 0 && data.p() != state.p() {
        return Err(Error::Dimension { expected: state.p(), got: data.p() });
    }
    let n = state.n_components();
    let mut w = vec![T::zero(); n];
    let mut r = vec![T::zero(); n];
    let mut terms = vec![T::zero(); n];
    let mut total = T::zero();
    for (i, (u, x)) in data.pairs().iter().zip(data.design()).enumerate() {
        state.fill_at(x, &mut w, &mut r);
        let scores = GaussianScores::new(*u);
        for j in 0..n {
            terms[j] = w[j].ln() + scores.log_density(r[j]);
        }
        let li = log_sum_exp(&terms);
        if !li.is_finite() {
            return Err(Error::NumericalRow { row: i, detail: format!("log mixture density {}", show(li)) });
        }
        total = total + li;
    }
    Ok(total)
}
