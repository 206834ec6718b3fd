use super::links::{rho_link, stick_weights};
use crate::copula::{GaussianScores, MixtureOfGaussianCopulas};
use crate::data::PseudoDataset;
use crate::real::{show, Real};
use crate::{Error, Result};

/// State of the LDVR baseline: calibration coefficients β = (β1, β2) of
/// θ(x) = β1 + β2 x², covariate-free stick variables, and the concentration
/// of their Beta(1, α) prior.
#[derive(Clone, Debug, PartialEq)]
pub struct LdvrState<T> {
    beta: [T; 2],
    v: Vec<T>,
    alpha: T,
}

impl<T: Real> LdvrState<T> {
    /// `v` holds the N − 1 stick variables of an N-component truncation.
    pub fn new(beta: [T; 2], v: Vec<T>, alpha: T) -> Result<Self> {
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::Invariant("calibration coefficients must be finite".into()));
        }
        if v.is_empty() {
            return Err(Error::Invariant("truncation level must be at least 2".into()));
        }
        if let Some(bad) = v.iter().find(|&&x| !(x > T::zero() && x < T::one())) {
            return Err(Error::Invariant(format!("stick variable {} is not inside (0, 1)", show(*bad))));
        }
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(Error::Invariant(format!("concentration {} must be positive", show(alpha))));
        }
        Ok(Self { beta, v, alpha })
    }

    pub fn n_components(&self) -> usize {
        self.v.len() + 1
    }

    pub fn beta(&self) -> [T; 2] {
        self.beta
    }

    pub fn v(&self) -> &[T] {
        &self.v
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub(crate) fn set_beta(&mut self, beta: [T; 2]) {
        self.beta = beta;
    }

    pub(crate) fn set_v(&mut self, j: usize, v: T) {
        self.v[j] = v;
    }

    /// β1, β2, then the stick variables.
    pub fn to_flat(&self) -> Vec<T> {
        self.beta.iter().chain(&self.v).copied().collect()
    }

    pub fn from_flat(n: usize, alpha: T, flat: &[T]) -> Result<Self> {
        if n < 2 || flat.len() != n + 1 {
            return Err(Error::Dimension { expected: n + 1, got: flat.len() });
        }
        Self::new([flat[0], flat[1]], flat[2..].to_vec(), alpha)
    }

    pub fn field_names(n: usize) -> Vec<String> {
        let mut names = vec!["beta[1]".to_string(), "beta[2]".to_string()];
        names.extend((1..n).map(|j| format!("v[{j}]")));
        names
    }

    /// Shared correlation at `x`, from θ = β1 + β2 x[1]².
    pub fn rho_at(&self, x: &[T]) -> Result<T> {
        let c = x.get(1).ok_or(Error::Dimension { expected: 2, got: x.len() })?;
        Ok(rho_link(self.beta[0] + self.beta[1] * *c * *c))
    }

    pub fn weights(&self) -> Vec<T> {
        stick_weights(&self.v).expect("sticks validated on construction")
    }
}

/// The LDVR mixture at `x`: covariate-free weights, one shared correlation.
pub fn ldvr_mixture_at_x<T: Real>(state: &LdvrState<T>, x: &[T]) -> Result<MixtureOfGaussianCopulas<T>> {
    let rho = state.rho_at(x)?;
    MixtureOfGaussianCopulas::new(state.weights(), vec![rho; state.n_components()])
}

/// LDVR log-likelihood. With one shared correlation and weights summing to
/// one, each row's mixture density equals the single Gaussian-copula density.
pub fn ldvr_loglik<T: Real>(data: &PseudoDataset<T>, state: &LdvrState<T>) -> Result<T> {
    let mut total = T::zero();
    for (i, (u, x)) in data.pairs().iter().zip(data.design()).enumerate() {
        let li = GaussianScores::new(*u).log_density(state.rho_at(x)?);
        if !li.is_finite() {
            return Err(Error::NumericalRow { row: i, detail: format!("log density {}", show(li)) });
        }
        total = total + li;
    }
    Ok(total)
}
