//! Special functions and the random-stream contract.
//!
//! Every function here is pure and safe to call concurrently. Random draws go
//! through [`RngStream`], which is single-owner: one stream per chain or
//! worker.

mod bivariate;
mod normal;
mod rng;
mod student_t;

pub use bivariate::bivariate_normal_cdf;
pub use normal::{std_normal_cdf, std_normal_quantile};
pub use rng::RngStream;
pub use student_t::student_t_cdf;

pub(crate) use bivariate::bvn_lower;
pub(crate) use normal::{norm_cdf, norm_quantile};
pub(crate) use student_t::t_cdf;
