//! Covariate-dependent copula estimation.
//!
//! The central model is a dependent Dirichlet process mixture of bivariate
//! Gaussian copulas (DDPMC): at every covariate value `x` the copula density is
//!
//! ```text
//! c(u1, u2 | x) = Σ_j w_j(x) c_G(u1, u2 | ρ_j(x)),
//! w_j(x) = v_j(x) Π_{l<j} (1 - v_l(x)),   v_j(x) = logistic(x'β^v_j),
//! ρ_j(x) = 2 / (|x'β^ρ_j| + 1) - 1,
//! ```
//!
//! with Gaussian priors on the coefficient vectors. A single-measure baseline
//! (LDVR, one calibration function `θ(x | β) = β1 + β2 x²` driving every
//! correlation) is provided for comparison.
//!
//! The crate covers the numerical building blocks ([`numerics`]), copula
//! densities and Kendall's tau identities ([`copula`]), data preparation
//! ([`data`]), the likelihood and prior ([`model`]), slice-sampling MCMC
//! ([`mcmc`]), posterior summaries of the conditional tau ([`posttau`]), and
//! the synthetic scenarios used for validation ([`simulation`]).
//!
//! Numerical kernels are generic over [`Real`] (`f32` and `f64`); the
//! inference machinery runs in `f64`, and the aliases below name the concrete
//! types used there.

// NaN-rejecting checks are written as `!(x > 0.0)`; published constants keep
// their printed digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod copula;
pub mod data;
mod error;
pub mod mcmc;
pub mod model;
pub mod numerics;
pub mod posttau;
mod real;
pub mod simulation;

pub use error::{Error, Result};
pub use real::Real;

pub type UnitPair = copula::UnitPair<f64>;
pub type Mixture = copula::MixtureOfGaussianCopulas<f64>;
pub type PseudoDataset = data::PseudoDataset<f64>;
pub type DdpmcState = model::DdpmcState<f64>;
pub type LdvrState = model::LdvrState<f64>;
