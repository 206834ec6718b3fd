//! Incremental DDPMC likelihood for block-wise updates.
//!
//! Each row keeps its component log densities and their scaled exponentials
//! c̃_ij = exp(log c_ij − M_i), where M_i bounds log c over all admissible
//! correlations, so every row density is a sum of positive terms in linear
//! space. Updating one coefficient block touches one component (or one stick
//! and the weights after it); the contribution of the others is summed once
//! per block, not once per proposal.

use crate::copula::{log_sum_exp, GaussianScores};
use crate::data::PseudoDataset;
use crate::model::{dot, logistic, rho_link, DdpmcState};
use crate::{Error, Result};

/// Row sums below this are re-evaluated in log space.
const TINY: f64 = 1e-280;

pub(crate) struct DdpmcCache<'a> {
    data: &'a PseudoDataset<f64>,
    n_comp: usize,
    bound: Vec<f64>,
    scores: Vec<GaussianScores<f64>>,
    /// n × (N − 1) stick values.
    v: Vec<f64>,
    /// n × N weights, log densities and scaled densities.
    w: Vec<f64>,
    logc: Vec<f64>,
    ct: Vec<f64>,
    row_ll: Vec<f64>,
    // Per-block sums.
    head: Vec<f64>,
    rest: Vec<f64>,
    tail: Vec<f64>,
}

fn fill_weights(v: &[f64], w: &mut [f64]) {
    let mut rest = 1.0;
    for (wk, &vk) in w.iter_mut().zip(v) {
        *wk = rest * vk;
        rest *= 1.0 - vk;
    }
    w[v.len()] = rest;
}

impl<'a> DdpmcCache<'a> {
    pub(crate) fn new(data: &'a PseudoDataset<f64>, state: &DdpmcState<f64>) -> Result<Self> {
        if data.n() > 0 && data.p() != state.p() {
            return Err(Error::Dimension { expected: state.p(), got: data.p() });
        }
        let n = data.n();
        let nc = state.n_components();
        let scores: Vec<_> = data.pairs().iter().map(|&u| GaussianScores::new(u)).collect();
        let mut cache = Self {
            data,
            n_comp: nc,
            bound: scores.iter().map(|s| s.log_density_bound()).collect(),
            scores,
            v: vec![0.0; n * (nc - 1)],
            w: vec![0.0; n * nc],
            logc: vec![0.0; n * nc],
            ct: vec![0.0; n * nc],
            row_ll: vec![0.0; n],
            head: vec![0.0; n],
            rest: vec![0.0; n],
            tail: vec![0.0; n],
        };
        for j in 0..nc - 1 {
            cache.set_v(j, &state.beta_v()[j]);
        }
        for j in 0..nc {
            cache.set_rho(j, &state.beta_rho()[j]);
        }
        for i in 0..n {
            cache.refresh_row(i)?;
        }
        Ok(cache)
    }

    pub(crate) fn total(&self) -> f64 {
        self.row_ll.iter().sum()
    }

    fn set_v(&mut self, j: usize, beta: &[f64]) {
        let m = self.n_comp - 1;
        for (i, x) in self.data.design().iter().enumerate() {
            self.v[i * m + j] = logistic(dot(x, beta));
        }
    }

    fn set_rho(&mut self, j: usize, beta: &[f64]) {
        let nc = self.n_comp;
        for (i, x) in self.data.design().iter().enumerate() {
            let lc = self.scores[i].log_density(rho_link(dot(x, beta)));
            self.logc[i * nc + j] = lc;
            self.ct[i * nc + j] = (lc - self.bound[i]).exp();
        }
    }

    fn refresh_row(&mut self, i: usize) -> Result<()> {
        let nc = self.n_comp;
        let m = nc - 1;
        fill_weights(&self.v[i * m..(i + 1) * m], &mut self.w[i * nc..(i + 1) * nc]);
        let w = &self.w[i * nc..(i + 1) * nc];
        let ct = &self.ct[i * nc..(i + 1) * nc];
        let s: f64 = w.iter().zip(ct).map(|(a, b)| a * b).sum();
        let ll = if s > TINY { s.ln() + self.bound[i] } else { self.row_lse(i, w, &self.logc[i * nc..(i + 1) * nc]) };
        self.row_ll[i] = check(i, ll)?;
        Ok(())
    }

    fn row_lse(&self, _i: usize, w: &[f64], logc: &[f64]) -> f64 {
        let terms: Vec<f64> = w.iter().zip(logc).map(|(&a, &b)| a.ln() + b).collect();
        log_sum_exp(&terms)
    }

    /// Sums the other components once before proposals for β^ρ_j.
    pub(crate) fn prepare_rho(&mut self, j: usize) {
        let nc = self.n_comp;
        for i in 0..self.data.n() {
            let w = &self.w[i * nc..(i + 1) * nc];
            let ct = &self.ct[i * nc..(i + 1) * nc];
            self.head[i] = (0..nc).filter(|&k| k != j).map(|k| w[k] * ct[k]).sum();
        }
    }

    /// Log-likelihood with β^ρ_j replaced by `beta`; needs [`prepare_rho`](Self::prepare_rho).
    pub(crate) fn eval_rho(&self, j: usize, beta: &[f64]) -> Result<f64> {
        let nc = self.n_comp;
        let mut total = 0.0;
        for (i, x) in self.data.design().iter().enumerate() {
            let lc = self.scores[i].log_density(rho_link(dot(x, beta)));
            let s = self.head[i] + self.w[i * nc + j] * (lc - self.bound[i]).exp();
            let ll = if s > TINY {
                s.ln() + self.bound[i]
            } else {
                let mut logc = self.logc[i * nc..(i + 1) * nc].to_vec();
                logc[j] = lc;
                self.row_lse(i, &self.w[i * nc..(i + 1) * nc], &logc)
            };
            total += check(i, ll)?;
        }
        Ok(total)
    }

    pub(crate) fn commit_rho(&mut self, j: usize, beta: &[f64]) -> Result<()> {
        self.set_rho(j, beta);
        for i in 0..self.data.n() {
            self.refresh_row(i)?;
        }
        Ok(())
    }

    /// Sums the weights before stick j and the relative weights after it.
    pub(crate) fn prepare_v(&mut self, j: usize) {
        let nc = self.n_comp;
        let m = nc - 1;
        for i in 0..self.data.n() {
            let v = &self.v[i * m..(i + 1) * m];
            let w = &self.w[i * nc..(i + 1) * nc];
            let ct = &self.ct[i * nc..(i + 1) * nc];
            self.head[i] = (0..j).map(|k| w[k] * ct[k]).sum();
            self.rest[i] = v[..j].iter().map(|&vk| 1.0 - vk).product();
            let mut t = ct[nc - 1];
            for k in (j + 1..m).rev() {
                t = v[k] * ct[k] + (1.0 - v[k]) * t;
            }
            self.tail[i] = t;
        }
    }

    /// Log-likelihood with β^v_j replaced by `beta`; needs [`prepare_v`](Self::prepare_v).
    pub(crate) fn eval_v(&self, j: usize, beta: &[f64]) -> Result<f64> {
        let nc = self.n_comp;
        let m = nc - 1;
        let mut total = 0.0;
        for (i, x) in self.data.design().iter().enumerate() {
            let vj = logistic(dot(x, beta));
            let s = self.head[i] + self.rest[i] * (vj * self.ct[i * nc + j] + (1.0 - vj) * self.tail[i]);
            let ll = if s > TINY {
                s.ln() + self.bound[i]
            } else {
                let mut v = self.v[i * m..(i + 1) * m].to_vec();
                v[j] = vj;
                let mut w = vec![0.0; nc];
                fill_weights(&v, &mut w);
                self.row_lse(i, &w, &self.logc[i * nc..(i + 1) * nc])
            };
            total += check(i, ll)?;
        }
        Ok(total)
    }

    pub(crate) fn commit_v(&mut self, j: usize, beta: &[f64]) -> Result<()> {
        self.set_v(j, beta);
        for i in 0..self.data.n() {
            self.refresh_row(i)?;
        }
        Ok(())
    }
}

fn check(row: usize, ll: f64) -> Result<f64> {
    if ll.is_finite() {
        Ok(ll)
    } else {
        Err(Error::NumericalRow { row, detail: format!("log mixture density {ll}") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::UnitPair;
    use crate::model::ddpmc_loglik;
    use crate::numerics::RngStream;
    use proptest::prelude::*;
    use rand::Rng;

    fn data(n: usize, seed: u64) -> PseudoDataset<f64> {
        let mut rng = RngStream::new(seed, 0);
        let pairs = (0..n).map(|_| UnitPair::new(rng.open01(), rng.open01()).unwrap()).collect();
        let design = (0..n).map(|_| vec![1.0, rng.open01(), rng.random::<f64>() * 2.0 - 1.0]).collect();
        PseudoDataset::new(pairs, design, 3).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-10 * (1.0 + b.abs())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn cache_tracks_reference(seed in 0u64..1000, nc in 2usize..7, scale in 0.5f64..12.0) {
            let d = data(25, seed);
            let mut rng = RngStream::new(seed, 1);
            let draw = |rng: &mut RngStream| (0..3).map(|_| scale * (rng.random::<f64>() * 2.0 - 1.0)).collect::<Vec<f64>>();
            let mut state = DdpmcState::new(
                (0..nc - 1).map(|_| draw(&mut rng)).collect(),
                (0..nc).map(|_| draw(&mut rng)).collect(),
            ).unwrap();
            let mut cache = DdpmcCache::new(&d, &state).unwrap();
            prop_assert!(close(cache.total(), ddpmc_loglik(&d, &state).unwrap()));
            for step in 0..3 * nc {
                let beta = draw(&mut rng);
                if step % 2 == 0 && nc > 1 {
                    let j = step / 2 % (nc - 1);
                    cache.prepare_v(j);
                    let mut s2 = state.clone();
                    *s2.beta_v_mut(j) = beta.clone();
                    let want = ddpmc_loglik(&d, &s2).unwrap();
                    prop_assert!(close(cache.eval_v(j, &beta).unwrap(), want));
                    cache.commit_v(j, &beta).unwrap();
                    state = s2;
                } else {
                    let j = step % nc;
                    cache.prepare_rho(j);
                    let mut s2 = state.clone();
                    *s2.beta_rho_mut(j) = beta.clone();
                    let want = ddpmc_loglik(&d, &s2).unwrap();
                    prop_assert!(close(cache.eval_rho(j, &beta).unwrap(), want));
                    cache.commit_rho(j, &beta).unwrap();
                    state = s2;
                }
                prop_assert!(close(cache.total(), ddpmc_loglik(&d, &state).unwrap()));
            }
        }
    }

    #[test]
    fn extreme_correlations_fall_back_to_log_space() {
        // A pair with strongly positive scores against components near ρ = −1.
        let d = PseudoDataset::new(vec![UnitPair::new(0.999, 0.999).unwrap()], vec![vec![1.0]], 1).unwrap();
        let state = DdpmcState::new(vec![vec![0.0]], vec![vec![1e6], vec![2e6]]).unwrap();
        let cache = DdpmcCache::new(&d, &state).unwrap();
        let want = ddpmc_loglik(&d, &state).unwrap();
        assert!(want < -1e4);
        assert!(close(cache.total(), want));
    }
}
