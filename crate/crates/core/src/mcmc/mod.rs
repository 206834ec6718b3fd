//! Posterior sampling by hyperrectangle slice sampling, chain persistence and
//! convergence diagnostics.

mod cache;
mod chainfile;
mod diagnostics;
mod slice;

pub use chainfile::{read_chain, write_chain, ChainHeader, ChainWriter, CHAIN_FORMAT};
pub use diagnostics::{
    effective_sample_size, geweke_z, integrated_autocorrelation_time, mc_standard_error, two_chain_z,
    ScalarDiagnostics, MIN_DRAWS,
};
pub use slice::{slice_update_vector, HyperrectSlice, SliceStep};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::copula::GaussianScores;
use crate::data::{DesignLayout, PseudoDataset};
use crate::model::{logistic, rho_link, DdpmcState, LdvrState, ModelKind, ModelState, PreparedPrior, PriorSpec};
use crate::numerics::RngStream;
use cache::DdpmcCache;
use crate::{Error, Result};

/// Explicit slice widths per coefficient block; unset blocks fall back to
/// `width_sds` prior standard deviations.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SliceWidths {
    pub v: Option<Vec<f64>>,
    pub rho: Option<Vec<f64>>,
    pub ldvr_beta: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// Truncation level N.
    pub truncation: usize,
    /// Default slice width, in prior standard deviations.
    pub width_sds: f64,
    pub widths: SliceWidths,
    /// Shrinkage steps allowed per slice update before the chain aborts.
    pub max_shrink_steps: usize,
    /// Random-walk scale of LDVR stick updates on the logit scale.
    pub stick_step: f64,
    pub seed: u64,
    pub stream: u64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            iterations: 20_000,
            burn_in: 5_000,
            thin: 5,
            truncation: 20,
            width_sds: 5.0,
            widths: SliceWidths::default(),
            max_shrink_steps: 1_000,
            stick_step: 2.0,
            seed: 1,
            stream: 0,
        }
    }
}

impl ChainConfig {
    /// 110,000 iterations, burn-in 10,000, thinning 10.
    pub fn simulation_study() -> Self {
        Self { iterations: 110_000, burn_in: 10_000, thin: 10, ..Self::default() }
    }

    /// 300,000 iterations, burn-in 200,000, thinning 20.
    pub fn application() -> Self {
        Self { iterations: 300_000, burn_in: 200_000, thin: 20, ..Self::default() }
    }

    /// floor((iterations − burn_in) / thin).
    pub fn saved_draws(&self) -> usize {
        self.iterations.saturating_sub(self.burn_in) / self.thin.max(1)
    }

    fn saves(&self, t: usize) -> bool {
        t > self.burn_in && (t - self.burn_in).is_multiple_of(self.thin)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.iterations == 0 {
            return fail("iterations must be positive");
        }
        if self.burn_in >= self.iterations {
            return fail("burn_in must be smaller than iterations");
        }
        if self.thin == 0 {
            return fail("thin must be at least 1");
        }
        if self.truncation < 2 {
            return fail("truncation must be at least 2");
        }
        if !(self.width_sds > 0.0 && self.width_sds.is_finite()) {
            return fail("width_sds must be positive");
        }
        if self.max_shrink_steps == 0 {
            return fail("max_shrink_steps must be positive");
        }
        if !(self.stick_step > 0.0 && self.stick_step.is_finite()) {
            return fail("stick_step must be positive");
        }
        Ok(())
    }
}

/// Sampler bookkeeping that is not part of the posterior draws.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SamplerStats {
    pub mean_slice_evaluations: f64,
    pub stick_acceptance: Option<f64>,
}

/// Saved posterior states with their log posterior trace.
#[derive(Clone, Debug)]
pub struct Chain {
    header: ChainHeader,
    draws: Vec<Vec<f64>>,
    log_posterior: Vec<f64>,
    stats: Option<SamplerStats>,
}

impl Chain {
    pub(crate) fn from_parts(header: ChainHeader, draws: Vec<Vec<f64>>, log_posterior: Vec<f64>) -> Result<Self> {
        let chain = Self { header, draws, log_posterior, stats: None };
        for m in 0..chain.n_draws().min(1) {
            chain.state(m)?;
        }
        Ok(chain)
    }

    pub fn header(&self) -> &ChainHeader {
        &self.header
    }

    pub fn kind(&self) -> ModelKind {
        self.header.model
    }

    pub fn config(&self) -> &ChainConfig {
        &self.header.config
    }

    pub fn layout(&self) -> Option<&DesignLayout> {
        self.header.layout.as_ref()
    }

    pub fn p(&self) -> usize {
        self.header.p
    }

    pub fn n_draws(&self) -> usize {
        self.draws.len()
    }

    /// Flattened saved states, in the order of [`ChainHeader::fields`].
    pub fn draws(&self) -> &[Vec<f64>] {
        &self.draws
    }

    pub fn log_posterior(&self) -> &[f64] {
        &self.log_posterior
    }

    pub fn stats(&self) -> Option<&SamplerStats> {
        self.stats.as_ref()
    }

    /// Saved state `m`.
    pub fn state(&self, m: usize) -> Result<ModelState<f64>> {
        let flat = &self.draws[m];
        match self.header.model {
            ModelKind::Ddpmc => {
                Ok(ModelState::Ddpmc(DdpmcState::from_flat(self.header.n_components, self.header.p, flat)?))
            }
            ModelKind::Ldvr => Ok(ModelState::Ldvr(LdvrState::from_flat(
                self.header.n_components,
                self.header.alpha,
                flat,
            )?)),
        }
    }

    pub fn states(&self) -> impl Iterator<Item = Result<ModelState<f64>>> + '_ {
        (0..self.n_draws()).map(|m| self.state(m))
    }

    /// Trace of field `k`.
    pub fn trace(&self, k: usize) -> Vec<f64> {
        self.draws.iter().map(|d| d[k]).collect()
    }
}

/// Diagnostics of every traced scalar: the state fields, then the log posterior.
pub fn diagnostics(chain: &Chain) -> Result<Vec<ScalarDiagnostics>> {
    let mut out = Vec::with_capacity(chain.header.fields.len() + 1);
    for (k, name) in chain.header.fields.iter().enumerate() {
        out.push(ScalarDiagnostics::of(name.clone(), &chain.trace(k))?);
    }
    out.push(ScalarDiagnostics::of("log_posterior", chain.log_posterior())?);
    Ok(out)
}

/// Header of the chain [`run_chain`] would produce, for opening a
/// [`ChainWriter`] before sampling starts.
pub fn chain_header(data: &PseudoDataset<f64>, prior: &PriorSpec, kind: ModelKind, config: &ChainConfig) -> Result<ChainHeader> {
    config.validate()?;
    Ok(header_for(data, &prior.prepare()?, kind, config))
}

fn header_for(data: &PseudoDataset<f64>, prior: &PreparedPrior, kind: ModelKind, config: &ChainConfig) -> ChainHeader {
    let n = config.truncation;
    let p = prior.p();
    let fields = match kind {
        ModelKind::Ddpmc => DdpmcState::<f64>::field_names(n, p),
        ModelKind::Ldvr => LdvrState::<f64>::field_names(n),
    };
    ChainHeader {
        format: CHAIN_FORMAT.to_string(),
        model: kind,
        p,
        n_components: n,
        alpha: prior.ldvr_alpha,
        n_obs: data.n(),
        config: config.clone(),
        seed: config.seed,
        stream: config.stream,
        record_len: fields.len() + 1,
        fields,
        layout: data.layout().cloned(),
    }
}

fn block_widths(explicit: &Option<Vec<f64>>, sds: Vec<f64>, config: &ChainConfig, max_shrink: usize) -> Result<HyperrectSlice> {
    let widths = match explicit {
        Some(w) if w.len() != sds.len() => return Err(Error::Dimension { expected: sds.len(), got: w.len() }),
        Some(w) => w.clone(),
        None => sds.iter().map(|s| s * config.width_sds).collect(),
    };
    HyperrectSlice::new(widths, max_shrink)
}

/// Runs one chain and keeps the saved draws in memory.
pub fn run_chain(data: &PseudoDataset<f64>, prior: &PriorSpec, kind: ModelKind, config: &ChainConfig) -> Result<Chain> {
    run_chain_with(data, prior, kind, config, None)
}

/// Runs one chain, also streaming every saved draw to `sink` if given.
pub fn run_chain_with(
    data: &PseudoDataset<f64>,
    prior: &PriorSpec,
    kind: ModelKind,
    config: &ChainConfig,
    mut sink: Option<&mut ChainWriter>,
) -> Result<Chain> {
    config.validate()?;
    let prior = prior.prepare()?;
    if data.n() > 0 && data.p() != prior.p() {
        return Err(Error::Dimension { expected: prior.p(), got: data.p() });
    }
    if prior.v.dim() != prior.p() {
        return Err(Error::Dimension { expected: prior.p(), got: prior.v.dim() });
    }
    let header = header_for(data, &prior, kind, config);
    let mut draws = Vec::with_capacity(config.saved_draws());
    let mut log_post = Vec::with_capacity(config.saved_draws());
    let mut record = |flat: Vec<f64>, lp: f64| -> Result<()> {
        if let Some(w) = sink.as_deref_mut() {
            let mut rec = flat.clone();
            rec.push(lp);
            w.write_record(&rec)?;
        }
        draws.push(flat);
        log_post.push(lp);
        Ok(())
    };
    let mut rng = RngStream::new(config.seed, config.stream);
    let stats = match kind {
        ModelKind::Ddpmc => sample_ddpmc(data, &prior, config, &mut rng, &mut record)?,
        ModelKind::Ldvr => sample_ldvr(data, &prior, config, &mut rng, &mut record)?,
    };
    Ok(Chain { header, draws, log_posterior: log_post, stats: Some(stats) })
}

/// Runs `k` chains concurrently on stream ids 0..k−1.
pub fn run_chains(
    data: &PseudoDataset<f64>,
    prior: &PriorSpec,
    kind: ModelKind,
    config: &ChainConfig,
    k: usize,
) -> Result<Vec<Chain>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..k as u64)
            .map(|stream| {
                let cfg = ChainConfig { stream, ..config.clone() };
                scope.spawn(move || run_chain(data, prior, kind, &cfg))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("chain thread panicked")).collect()
    })
}

fn abort(iteration: usize) -> impl FnOnce(Error) -> Error {
    move |e| Error::Aborted { iteration, source: Box::new(e) }
}

fn sample_ddpmc(
    data: &PseudoDataset<f64>,
    prior: &PreparedPrior,
    config: &ChainConfig,
    rng: &mut RngStream,
    record: &mut dyn FnMut(Vec<f64>, f64) -> Result<()>,
) -> Result<SamplerStats> {
    let n = config.truncation;
    let p = prior.p();
    let mut intercept = vec![0.0; p];
    intercept[0] = 1.0;
    let mut state = DdpmcState::constant(n, &vec![0.0; p], &intercept)?;
    let mut cache = DdpmcCache::new(data, &state).map_err(abort(0))?;
    let slice_v = block_widths(&config.widths.v, prior.v.sds(), config, config.max_shrink_steps)?;
    let slice_rho = block_widths(&config.widths.rho, prior.rho.sds(), config, config.max_shrink_steps)?;

    let mut evaluations = 0usize;
    let mut updates = 0usize;
    for t in 1..=config.iterations {
        let mut sweep = || -> Result<()> {
            for j in 0..n {
                if j + 1 < n {
                    cache.prepare_v(j);
                    let cur = state.beta_v()[j].clone();
                    let f0 = prior.v.log_density(&cur) + cache.total();
                    let step = slice_v.step(|b| Ok(prior.v.log_density(b) + cache.eval_v(j, b)?), &cur, f0, rng)?;
                    cache.commit_v(j, &step.x)?;
                    *state.beta_v_mut(j) = step.x;
                    evaluations += step.evaluations;
                    updates += 1;
                }
                cache.prepare_rho(j);
                let cur = state.beta_rho()[j].clone();
                let f0 = prior.rho.log_density(&cur) + cache.total();
                let step = slice_rho.step(|b| Ok(prior.rho.log_density(b) + cache.eval_rho(j, b)?), &cur, f0, rng)?;
                cache.commit_rho(j, &step.x)?;
                *state.beta_rho_mut(j) = step.x;
                evaluations += step.evaluations;
                updates += 1;
            }
            Ok(())
        };
        sweep().map_err(abort(t))?;
        if config.saves(t) {
            let lp = cache.total() + prior.log_prior_ddpmc(&state).map_err(abort(t))?;
            record(state.to_flat(), lp).map_err(abort(t))?;
        }
    }
    Ok(SamplerStats { mean_slice_evaluations: evaluations as f64 / updates.max(1) as f64, stick_acceptance: None })
}

fn sample_ldvr(
    data: &PseudoDataset<f64>,
    prior: &PreparedPrior,
    config: &ChainConfig,
    rng: &mut RngStream,
    record: &mut dyn FnMut(Vec<f64>, f64) -> Result<()>,
) -> Result<SamplerStats> {
    let n = config.truncation;
    if data.n() > 0 && data.p() < 2 {
        return Err(Error::Dimension { expected: 2, got: data.p() });
    }
    let scores: Vec<GaussianScores<f64>> = data.pairs().iter().map(|&u| GaussianScores::new(u)).collect();
    let xsq: Vec<f64> = data.design().iter().map(|x| x[1] * x[1]).collect();
    let loglik = |b: &[f64]| -> Result<f64> {
        let mut total = 0.0;
        for (i, (s, &q)) in scores.iter().zip(&xsq).enumerate() {
            let li = s.log_density(rho_link(b[0] + b[1] * q));
            if !li.is_finite() {
                return Err(Error::NumericalRow { row: i, detail: format!("log density {li}") });
            }
            total += li;
        }
        Ok(total)
    };
    let mut state = LdvrState::new([1.0, 0.0], vec![0.5; n - 1], prior.ldvr_alpha)?;
    let slice_beta = block_widths(&config.widths.ldvr_beta, prior.ldvr_beta.sds(), config, config.max_shrink_steps)?;
    let mut ll = loglik(&state.beta()).map_err(abort(0))?;

    let mut evaluations = 0usize;
    let (mut accepted, mut proposed) = (0usize, 0usize);
    for t in 1..=config.iterations {
        let mut sweep = || -> Result<()> {
            let cur = state.beta();
            let f0 = prior.ldvr_beta.log_density(&cur) + ll;
            let step = slice_beta.step(|b| Ok(prior.ldvr_beta.log_density(b) + loglik(b)?), &cur, f0, rng)?;
            ll = step.log_target - prior.ldvr_beta.log_density(&step.x);
            state.set_beta([step.x[0], step.x[1]]);
            evaluations += step.evaluations;
            // Sticks leave the likelihood unchanged; each moves under its
            // Beta(1, α) prior by a logit-scale random walk.
            for j in 0..n - 1 {
                let v = state.v()[j];
                let z: f64 = StandardNormal.sample(rng);
                let prop = logistic((v / (1.0 - v)).ln() + config.stick_step * z);
                let log_ratio = prior.log_stick(prop) - prior.log_stick(v)
                    + (prop * (1.0 - prop)).ln()
                    - (v * (1.0 - v)).ln();
                proposed += 1;
                if rng.open01().ln() < log_ratio {
                    state.set_v(j, prop);
                    accepted += 1;
                }
            }
            Ok(())
        };
        sweep().map_err(abort(t))?;
        if config.saves(t) {
            let lp = ll + prior.log_prior_ldvr(&state);
            record(state.to_flat(), lp).map_err(abort(t))?;
        }
    }
    Ok(SamplerStats {
        mean_slice_evaluations: evaluations as f64 / config.iterations as f64,
        stick_acceptance: Some(accepted as f64 / proposed.max(1) as f64),
    })
}
