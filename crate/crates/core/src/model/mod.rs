//! Likelihoods and priors for the DDPMC model and the LDVR baseline.

mod ddpmc;
mod ldvr;
mod links;
mod prior;

pub use ddpmc::{ddpmc_loglik, ddpmc_mixture_at_x, DdpmcState};
pub use ldvr::{ldvr_loglik, ldvr_mixture_at_x, LdvrState};
pub use links::{rho_of_x, stick_weights, v_of_x};
pub use prior::{log_prior, LdvrPrior, MvnPrior, PreparedPrior, PriorSpec};

pub(crate) use links::{dot, logistic, rho_link};

use serde::{Deserialize, Serialize};

use crate::copula::{mixture_tau, MixtureOfGaussianCopulas};
use crate::data::PseudoDataset;
use crate::real::Real;
use crate::Result;

/// Which model a chain samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ddpmc,
    Ldvr,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Ddpmc => "ddpmc",
            ModelKind::Ldvr => "ldvr",
        })
    }
}

impl std::str::FromStr for ModelKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ddpmc" => Ok(ModelKind::Ddpmc),
            "ldvr" => Ok(ModelKind::Ldvr),
            _ => Err(crate::Error::Config(format!("unknown model `{s}` (expected ddpmc or ldvr)"))),
        }
    }
}

/// A state of either model.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelState<T> {
    Ddpmc(DdpmcState<T>),
    Ldvr(LdvrState<T>),
}

impl<T: Real> ModelState<T> {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelState::Ddpmc(_) => ModelKind::Ddpmc,
            ModelState::Ldvr(_) => ModelKind::Ldvr,
        }
    }

    pub fn mixture_at_x(&self, x: &[T]) -> Result<MixtureOfGaussianCopulas<T>> {
        match self {
            ModelState::Ddpmc(s) => ddpmc_mixture_at_x(s, x),
            ModelState::Ldvr(s) => ldvr_mixture_at_x(s, x),
        }
    }

    /// Conditional Kendall's tau at `x`.
    pub fn tau_at_x(&self, x: &[T]) -> Result<T> {
        match self {
            ModelState::Ddpmc(s) => Ok(mixture_tau(&ddpmc_mixture_at_x(s, x)?)),
            // One shared correlation: the mixture collapses to (2/π) asin ρ.
            ModelState::Ldvr(s) => Ok(T::FRAC_2_PI() * s.rho_at(x)?.asin()),
        }
    }

    pub fn loglik(&self, data: &PseudoDataset<T>) -> Result<T> {
        match self {
            ModelState::Ddpmc(s) => ddpmc_loglik(data, s),
            ModelState::Ldvr(s) => ldvr_loglik(data, s),
        }
    }

    pub fn to_flat(&self) -> Vec<T> {
        match self {
            ModelState::Ddpmc(s) => s.to_flat(),
            ModelState::Ldvr(s) => s.to_flat(),
        }
    }
}
