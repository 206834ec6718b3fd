use crate::numerics::RngStream;
use crate::{Error, Result};

/// Outcome of one hyperrectangle slice update.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceStep {
    pub x: Vec<f64>,
    pub log_target: f64,
    /// Target evaluations spent, excluding the one at the current point.
    pub evaluations: usize,
}

/// Multivariate slice sampler with an axis-aligned hyperrectangle, randomly
/// positioned around the current point, shrunk toward it on rejection.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperrectSlice {
    widths: Vec<f64>,
    max_shrink: usize,
}

impl HyperrectSlice {
    pub fn new(widths: Vec<f64>, max_shrink: usize) -> Result<Self> {
        if widths.is_empty() || widths.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::Config(format!("slice widths must be positive and finite, got {widths:?}")));
        }
        if max_shrink == 0 {
            return Err(Error::Config("max_shrink_steps must be positive".into()));
        }
        Ok(Self { widths, max_shrink })
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    /// One update from `current`, whose log target is `current_log_target`.
    pub fn step<F>(&self, mut log_target: F, current: &[f64], current_log_target: f64, rng: &mut RngStream) -> Result<SliceStep>
    where
        F: FnMut(&[f64]) -> Result<f64>,
    {
        let d = self.widths.len();
        if current.len() != d {
            return Err(Error::Dimension { expected: d, got: current.len() });
        }
        if !current_log_target.is_finite() {
            return Err(Error::Sampler(format!("log target at the current point is {current_log_target}")));
        }
        let level = current_log_target + rng.open01().ln();
        let mut lo: Vec<f64> = current.iter().zip(&self.widths).map(|(&x, &w)| x - w * rng.open01()).collect();
        let mut hi: Vec<f64> = lo.iter().zip(&self.widths).map(|(&l, &w)| l + w).collect();
        let mut x = vec![0.0; d];
        for evaluations in 1..=self.max_shrink {
            for k in 0..d {
                x[k] = lo[k] + rng.open01() * (hi[k] - lo[k]);
            }
            let f = log_target(&x)?;
            if f.is_nan() {
                return Err(Error::Sampler("log target returned NaN".into()));
            }
            if f > level {
                return Ok(SliceStep { x, log_target: f, evaluations });
            }
            for k in 0..d {
                if x[k] < current[k] {
                    lo[k] = x[k];
                } else {
                    hi[k] = x[k];
                }
            }
        }
        Err(Error::Sampler(format!("slice not hit after {} shrinkage steps", self.max_shrink)))
    }
}

/// One hyperrectangle slice-sampling update of `current` under `log_target`.
pub fn slice_update_vector<F>(mut log_target: F, current: &[f64], widths: &[f64], rng: &mut RngStream) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let sampler = HyperrectSlice::new(widths.to_vec(), 10_000)?;
    let f0 = log_target(current)?;
    Ok(sampler.step(log_target, current, f0, rng)?.x)
}
