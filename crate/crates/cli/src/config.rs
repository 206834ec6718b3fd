//! JSON configuration documents, one per command. Every field has a default
//! so an empty object `{}` is a valid configuration.

use std::fs;
use std::path::{Path, PathBuf};

use ddpmc::data::{CovariateSchema, DatasetSchema, GPriorTargets};
use ddpmc::mcmc::ChainConfig;
use ddpmc::model::{ModelKind, PriorSpec};
use ddpmc::simulation::ScenarioConfig;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;
use crate::{CliError, Result};

/// Reads a configuration file, or the defaults when `path` is `None`.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else { return Ok(T::default()) };
    let text = fs::read_to_string(path).map_err(CliError::file(path))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid configuration {}: {e}", path.display())))
}

pub(crate) fn require_out(out: &Option<PathBuf>) -> Result<&Path> {
    out.as_deref().ok_or_else(|| CliError::Usage("no output location given (use --out)".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulateConfig {
    #[serde(flatten)]
    pub scenario: ScenarioConfig,
    /// Number of points in the truth grid on [0.01, 0.99].
    pub grid_points: usize,
    pub out_dir: Option<PathBuf>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self { scenario: ScenarioConfig::default(), grid_points: 100, out_dir: None }
    }
}

/// Keep only rows whose `column` lies between two sample quantiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowFilter {
    pub column: String,
    pub lower: f64,
    pub upper: f64,
}

fn default_variance() -> f64 {
    2.25
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorChoice {
    /// Zero means and `variance · I` for both coefficient families.
    Isotropic {
        #[serde(default = "default_variance")]
        variance: f64,
    },
    /// Means and covariances given in full.
    Explicit(PriorSpec),
    /// Block g-prior on the design. Missing scale constants are calibrated
    /// against the prior-predictive `targets`.
    Gprior {
        #[serde(default)]
        c_v: Option<f64>,
        #[serde(default)]
        c_rho: Option<f64>,
        #[serde(default)]
        targets: GPriorTargets,
    },
}

impl Default for PriorChoice {
    fn default() -> Self {
        PriorChoice::Isotropic { variance: default_variance() }
    }
}

pub fn default_schema() -> DatasetSchema {
    DatasetSchema {
        y1: "y1".into(),
        y2: "y2".into(),
        covariates: CovariateSchema { continuous: vec!["x".into()], ..CovariateSchema::default() },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub data: Option<PathBuf>,
    pub schema: DatasetSchema,
    pub filter: Option<RowFilter>,
    pub model: ModelKind,
    pub prior: PriorChoice,
    pub chain: ChainConfig,
    /// Independent chains, run on stream ids 0..chains−1.
    pub chains: usize,
    pub out_dir: Option<PathBuf>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            data: None,
            schema: default_schema(),
            filter: None,
            model: ModelKind::Ddpmc,
            prior: PriorChoice::default(),
            chain: ChainConfig::default(),
            chains: 1,
            out_dir: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TauConfig {
    pub chain: Option<PathBuf>,
    pub grid: GridSpec,
    /// Credible level of the pointwise band.
    pub level: f64,
    /// Normal quantile level of the independence test threshold.
    pub test_level: f64,
    /// Sample size in the test statistic; defaults to the fitted n.
    pub n: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

impl Default for TauConfig {
    fn default() -> Self {
        Self { chain: None, grid: GridSpec::default(), level: 0.95, test_level: 0.975, n: None, out_dir: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CompareConfig {
    /// Truth table with columns `x` and `tau_true`.
    pub truth: Option<PathBuf>,
    /// Chain files, summarized by their posterior median on the truth grid.
    pub chains: Vec<PathBuf>,
    /// Curve tables with a `median` column on the truth grid.
    pub curves: Vec<PathBuf>,
    /// Covariate the truth grid refers to.
    pub covariate: String,
    pub out: Option<PathBuf>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { truth: None, chains: Vec::new(), curves: Vec::new(), covariate: "x".into(), out: None }
    }
}
