//! Synthetic scenarios with a covariate-dependent copula and known Kendall's
//! tau curve.
//!
//! * Scenario I: a t copula with correlation ρ(x) = x.
//! * Scenario II: with probability π(x) a t copula with ρ(x) = −x(1−x)²,
//!   otherwise a Gumbel copula with α(x) = x²(1−x) + 1.
//!
//! Covariates are uniform on (0, 1) and margins are standard normal.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::copula::{
    concordance_tau, elliptical_tau, gumbel_tau, sample_gumbel_copula, sample_t_copula, UnitPair,
};
use crate::data::{Column, RawDataset};
use crate::numerics::{norm_quantile, RngStream};
use crate::{Error, Result};

/// Stream ids at and above this offset drive the truth oracle, never data.
const ORACLE_STREAM: u64 = 1 << 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    I,
    II,
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" | "1" => Ok(Scenario::I),
            "II" | "ii" | "2" => Ok(Scenario::II),
            _ => Err(Error::Config(format!("unknown scenario `{s}` (expected I or II)"))),
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scenario::I => "I",
            Scenario::II => "II",
        })
    }
}

/// Probability π(x) of drawing the t component in Scenario II.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixWeight {
    /// π(x) = x
    Linear,
    /// π(x) = 1 − x
    Complement,
    /// π(x) = c
    Constant(f64),
}

impl MixWeight {
    pub fn at(&self, x: f64) -> f64 {
        match *self {
            MixWeight::Linear => x,
            MixWeight::Complement => 1.0 - x,
            MixWeight::Constant(c) => c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub n: usize,
    /// Degrees of freedom of the t copulas.
    pub nu: f64,
    pub mix_weight: MixWeight,
    pub seed: u64,
    pub stream: u64,
    /// Pairs per grid point for the Scenario II truth oracle.
    pub truth_pairs: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::I,
            n: 250,
            nu: 3.0,
            mix_weight: MixWeight::Linear,
            seed: 1,
            stream: 0,
            truth_pairs: 1_000_000,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(Error::Config(format!("n = {} must be at least 10", self.n)));
        }
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(Error::Config(format!("nu = {} must be positive", self.nu)));
        }
        if let MixWeight::Constant(c) = self.mix_weight {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::Config(format!("constant mixing weight {c} outside [0, 1]")));
            }
        }
        if self.truth_pairs == 0 {
            return Err(Error::Config("truth_pairs must be positive".into()));
        }
        Ok(())
    }
}

fn t_rho_ii(x: f64) -> f64 {
    -x * (1.0 - x) * (1.0 - x)
}

fn gumbel_alpha_ii(x: f64) -> f64 {
    x * x * (1.0 - x) + 1.0
}

/// One copula draw at covariate `x`.
pub fn sample_scenario_pair(config: &ScenarioConfig, x: f64, rng: &mut RngStream) -> Result<UnitPair<f64>> {
    match config.scenario {
        Scenario::I => sample_t_copula(x, config.nu, rng),
        Scenario::II => {
            if rng.open01() < config.mix_weight.at(x) {
                sample_t_copula(t_rho_ii(x), config.nu, rng)
            } else {
                sample_gumbel_copula(gumbel_alpha_ii(x), rng)
            }
        }
    }
}

/// A generated dataset: outcomes `y1`, `y2` and covariate column `x`.
#[derive(Clone, Debug)]
pub struct ScenarioData {
    pub raw: RawDataset,
    /// Latent copula draws behind the outcomes.
    pub latent: Vec<UnitPair<f64>>,
    pub x: Vec<f64>,
}

/// Draws `config.n` observations: x ~ U(0, 1), a copula pair at x, and
/// standard-normal margins y = Φ⁻¹(u).
pub fn generate_scenario(config: &ScenarioConfig) -> Result<ScenarioData> {
    config.validate()?;
    if config.stream >= ORACLE_STREAM {
        return Err(Error::Config("data stream ids must be below 2^32".into()));
    }
    let mut rng = RngStream::new(config.seed, config.stream);
    let mut x = Vec::with_capacity(config.n);
    let mut latent = Vec::with_capacity(config.n);
    for _ in 0..config.n {
        let xi = rng.open01();
        latent.push(sample_scenario_pair(config, xi, &mut rng)?);
        x.push(xi);
    }
    let y1 = latent.iter().map(|u| norm_quantile(u.u1)).collect();
    let y2 = latent.iter().map(|u| norm_quantile(u.u2)).collect();
    let raw = RawDataset::new(y1, y2, vec![("x".to_string(), Column::Continuous(x.clone()))])?;
    Ok(ScenarioData { raw, latent, x })
}

/// True Kendall's tau over `grid`.
///
/// Scenario I is (2/π) asin x. In Scenario II two independent draws come from
/// the same component with probability π² or (1 − π)², where tau is known in
/// closed form; only the cross term between a t draw and a Gumbel draw is
/// estimated by Monte Carlo, with `config.truth_pairs` pairs per point.
pub fn scenario_truth(config: &ScenarioConfig, grid: &[f64]) -> Result<Vec<f64>> {
    config.validate()?;
    if let Some(bad) = grid.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
        return Err(Error::domain(format!("truth grid point {bad} outside (0, 1)")));
    }
    grid.iter()
        .enumerate()
        .map(|(l, &x)| match config.scenario {
            Scenario::I => elliptical_tau(x),
            Scenario::II => {
                let p = config.mix_weight.at(x);
                let rho = t_rho_ii(x);
                let alpha = gumbel_alpha_ii(x);
                let within = p * p * elliptical_tau(rho)? + (1.0 - p) * (1.0 - p) * gumbel_tau(alpha)?;
                if p == 0.0 || p == 1.0 {
                    return Ok(within);
                }
                let mut rng = RngStream::new(config.seed, ORACLE_STREAM + l as u64);
                let mut first = true;
                let cross = concordance_tau(config.truth_pairs, &mut rng, |r| {
                    first = !first;
                    if first {
                        sample_gumbel_copula(alpha, r)
                    } else {
                        sample_t_copula(rho, config.nu, r)
                    }
                })?;
                Ok(within + 2.0 * p * (1.0 - p) * cross.tau)
            }
        })
        .collect()
}
