use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Fewest saved draws [`diagnostics`](super::diagnostics) accepts.
pub const MIN_DRAWS: usize = 200;

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Autocovariances γ_0, …, γ_{n−1} (divisor n), via a zero-padded FFT.
fn autocovariances(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let m = mean(x);
    let len = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex<f64>> = x.iter().map(|v| Complex::new(v - m, 0.0)).collect();
    buf.resize(len, Complex::new(0.0, 0.0));
    planner.plan_fft_forward(len).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    buf[..n].iter().map(|c| c.re / (len * n) as f64).collect()
}

/// Integrated autocorrelation time by Geyer's initial monotone sequence.
/// Returns `None` for a series with zero variance.
pub fn integrated_autocorrelation_time(x: &[f64]) -> Option<f64> {
    if x.len() < 2 {
        return None;
    }
    let g = autocovariances(x);
    let scale = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if !(g[0] > 1e-28 * scale * scale) {
        return None;
    }
    // Γ_k = γ_{2k} + γ_{2k+1}, summed while positive and forced monotone.
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for pair in g.chunks_exact(2) {
        let gk = (pair[0] + pair[1]).min(prev);
        if gk <= 0.0 {
            break;
        }
        prev = gk;
        sum += gk;
    }
    Some((-1.0 + 2.0 * sum / g[0]).max(1.0 / x.len() as f64))
}

/// Effective sample size n / τ, or `None` for a constant series.
pub fn effective_sample_size(x: &[f64]) -> Option<f64> {
    integrated_autocorrelation_time(x).map(|tau| x.len() as f64 / tau)
}

/// Monte Carlo standard error of the mean, from the effective sample size.
pub fn mc_standard_error(x: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let m = mean(x);
    let var = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    integrated_autocorrelation_time(x).map(|tau| (var * tau / n).sqrt())
}

/// Geweke z-score comparing the means of the first 10% and the last 50%.
/// Segment variances of the mean use the spectral density at zero,
/// estimated as γ₀ · τ.
pub fn geweke_z(x: &[f64]) -> Option<f64> {
    let n = x.len();
    let a = &x[..n / 10];
    let b = &x[n - n / 2..];
    let sa = mc_standard_error(a)?;
    let sb = mc_standard_error(b)?;
    Some((mean(a) - mean(b)) / (sa * sa + sb * sb).sqrt())
}

/// Convergence summary of one traced scalar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarDiagnostics {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub geweke_z: Option<f64>,
    pub ess: Option<f64>,
    /// Zero variance over the saved draws.
    pub degenerate: bool,
}

impl ScalarDiagnostics {
    pub fn of(name: impl Into<String>, x: &[f64]) -> Result<Self> {
        if x.len() < MIN_DRAWS {
            return Err(Error::Diagnostics(format!("{} saved draws; at least {MIN_DRAWS} required", x.len())));
        }
        let m = mean(x);
        let var = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64;
        let degenerate = !(var > 1e-24 * m * m);
        Ok(Self {
            name: name.into(),
            mean: m,
            sd: var.sqrt(),
            geweke_z: if degenerate { None } else { geweke_z(x) },
            ess: if degenerate { None } else { effective_sample_size(x) },
            degenerate,
        })
    }
}

/// z-score for equality of two chains' means of the same quantity.
pub fn two_chain_z(a: &[f64], b: &[f64]) -> Option<f64> {
    let sa = mc_standard_error(a)?;
    let sb = mc_standard_error(b)?;
    Some((mean(a) - mean(b)) / (sa * sa + sb * sb).sqrt())
}
