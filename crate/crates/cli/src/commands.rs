use std::fs;
use std::path::{Path, PathBuf};

use ddpmc::data::{build_design, calibrate_gprior, load_csv, quartile_filter, Column, RawDataset};
use ddpmc::mcmc::{
    chain_header, diagnostics, read_chain, run_chain_with, run_chains, two_chain_z, write_chain, Chain, ChainWriter,
    SamplerStats, ScalarDiagnostics,
};
use ddpmc::model::PriorSpec;
use ddpmc::posttau::{il1_grid, integrated_l1, single_covariate_grid, tau_curve, tau_test_report};
use ddpmc::simulation::{generate_scenario, scenario_truth};
use ddpmc::PseudoDataset;
use log::info;
use serde::Serialize;

use crate::config::{require_out, CompareConfig, FitConfig, PriorChoice, RowFilter, SimulateConfig, TauConfig};
use crate::grid::build_grid;
use crate::manifest::write_manifest;
use crate::{CliError, Result};

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(CliError::file(dir))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(CliError::file(path))?;
    Ok(csv::Writer::from_writer(file))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(CliError::file(path))
}

/// Shortest decimal text that reads back to the same `f64`.
fn num(v: f64) -> String {
    format!("{v}")
}

/// Writes `data.csv` (y1, y2, x), `truth.csv` (x, tau_true) and
/// `simulate.manifest.json` into the output directory.
pub fn cmd_simulate(config: &SimulateConfig) -> Result<Vec<PathBuf>> {
    let dir = require_out(&config.out_dir)?;
    config.scenario.validate()?;
    if config.grid_points == 0 {
        return Err(CliError::Usage("grid_points must be positive".into()));
    }
    create_dir(dir)?;

    let sample = generate_scenario(&config.scenario)?;
    let data_path = dir.join("data.csv");
    let mut w = csv_writer(&data_path)?;
    w.write_record(["y1", "y2", "x"])?;
    for ((a, b), x) in sample.raw.y1().iter().zip(sample.raw.y2()).zip(&sample.x) {
        w.write_record([num(*a), num(*b), num(*x)])?;
    }
    w.flush().map_err(CliError::file(&data_path))?;

    let grid = il1_grid(config.grid_points);
    let truth = scenario_truth(&config.scenario, &grid)?;
    let truth_path = dir.join("truth.csv");
    let mut w = csv_writer(&truth_path)?;
    w.write_record(["x", "tau_true"])?;
    for (x, t) in grid.iter().zip(&truth) {
        w.write_record([num(*x), num(*t)])?;
    }
    w.flush().map_err(CliError::file(&truth_path))?;

    let outputs = vec![data_path, truth_path];
    let manifest = write_manifest(&dir.join("simulate.manifest.json"), "simulate", config, &outputs)?;
    info!("scenario {} with n = {} written to {}", config.scenario.scenario, config.scenario.n, dir.display());
    Ok(outputs.into_iter().chain([manifest]).collect())
}

fn apply_filter(raw: RawDataset, filter: &RowFilter, y1: &str, y2: &str) -> Result<RawDataset> {
    let values = if filter.column == y1 {
        raw.y1().to_vec()
    } else if filter.column == y2 {
        raw.y2().to_vec()
    } else {
        match raw.column(&filter.column) {
            Some(Column::Continuous(v)) => v.clone(),
            Some(Column::Categorical(_)) => {
                return Err(ddpmc::Error::Schema(format!("filter column `{}` is not numeric", filter.column)).into())
            }
            None => {
                return Err(ddpmc::Error::Schema(format!("filter column `{}` is not loaded", filter.column)).into())
            }
        }
    };
    let rows = quartile_filter(&values, filter.lower, filter.upper)?;
    info!("filter on `{}` kept {} of {} rows", filter.column, rows.len(), raw.n());
    Ok(raw.select_rows(&rows))
}

/// Scale constants of a g-prior and, when calibrated, its prior-predictive checks.
#[derive(Clone, Debug, Serialize)]
pub struct GPriorReport {
    pub c_v: f64,
    pub c_rho: f64,
    pub calibrated_c_v: f64,
    pub calibrated_c_rho: f64,
    pub v_quantiles: [f64; 2],
    pub rho_quantile: f64,
}

fn resolve_prior(choice: &PriorChoice, data: &PseudoDataset) -> Result<(PriorSpec, Option<GPriorReport>)> {
    match choice {
        PriorChoice::Isotropic { variance } => {
            if !(*variance > 0.0 && variance.is_finite()) {
                return Err(CliError::Usage(format!("prior variance {variance} must be positive")));
            }
            Ok((PriorSpec::isotropic(data.p(), *variance), None))
        }
        PriorChoice::Explicit(spec) => Ok((spec.clone(), None)),
        PriorChoice::Gprior { c_v, c_rho, targets } => {
            let layout = data
                .layout()
                .ok_or_else(|| CliError::Usage("a g-prior needs a design built from a schema".into()))?;
            let mut cal =
                calibrate_gprior(data.design(), &layout.continuous_block(), &layout.discrete_block(), targets)?;
            let report = GPriorReport {
                c_v: c_v.unwrap_or(cal.c_v),
                c_rho: c_rho.unwrap_or(cal.c_rho),
                calibrated_c_v: cal.c_v,
                calibrated_c_rho: cal.c_rho,
                v_quantiles: cal.v_quantiles,
                rho_quantile: cal.rho_quantile,
            };
            for c in [report.c_v, report.c_rho] {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(CliError::Usage(format!("g-prior constant {c} must be positive")));
                }
            }
            cal.sigma_v *= report.c_v / cal.c_v;
            cal.sigma_rho *= report.c_rho / cal.c_rho;
            cal.c_v = report.c_v;
            cal.c_rho = report.c_rho;
            info!("g-prior constants c_v = {:.4}, c_rho = {:.4}", report.c_v, report.c_rho);
            Ok((PriorSpec::from_gprior(&cal), Some(report)))
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ChainSummary {
    pub file: String,
    pub stream: u64,
    pub draws: usize,
    pub sampler: Option<SamplerStats>,
    pub diagnostics: Option<Vec<ScalarDiagnostics>>,
    pub diagnostics_error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    pub model: String,
    pub n_obs: usize,
    pub p: usize,
    pub columns: Vec<String>,
    /// CSV line numbers dropped for missing values.
    pub dropped_lines: Vec<usize>,
    pub prior: PriorSpec,
    pub gprior: Option<GPriorReport>,
    pub chains: Vec<ChainSummary>,
    /// Two-chain z statistic of the log posterior between the first two chains.
    pub log_posterior_two_chain_z: Option<f64>,
}

fn summarize(chain: &Chain, path: &Path) -> ChainSummary {
    let (diag, err) = match diagnostics(chain) {
        Ok(d) => (Some(d), None),
        Err(e) => (None, Some(e.to_string())),
    };
    ChainSummary {
        file: path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        stream: chain.header().stream,
        draws: chain.n_draws(),
        sampler: chain.stats().cloned(),
        diagnostics: diag,
        diagnostics_error: err,
    }
}

/// Loads the data, runs the chain(s) and writes `{model}.chain` (or
/// `{model}-{k}.chain` per stream), `{model}.fit.json` and
/// `{model}.fit.manifest.json`.
pub fn cmd_fit(config: &FitConfig) -> Result<Vec<PathBuf>> {
    let dir = require_out(&config.out_dir)?;
    let data_path = config.data.as_deref().ok_or_else(|| CliError::Usage("no data file given (use --data)".into()))?;
    if config.chains == 0 {
        return Err(CliError::Usage("chains must be at least 1".into()));
    }
    config.chain.validate()?;
    if !data_path.is_file() {
        return Err(CliError::File {
            path: data_path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "data file not found"),
        });
    }
    let (mut raw, load) = load_csv(data_path, &config.schema)?;
    if let Some(f) = &config.filter {
        raw = apply_filter(raw, f, &config.schema.y1, &config.schema.y2)?;
    }
    let data = build_design(&raw, &config.schema.covariates)?;
    let (prior, gprior) = resolve_prior(&config.prior, &data)?;
    create_dir(dir)?;

    let model = config.model;
    let mut outputs = Vec::new();
    let mut chains = Vec::new();
    if config.chains == 1 {
        let path = dir.join(format!("{model}.chain"));
        let header = chain_header(&data, &prior, model, &config.chain)?;
        let mut writer = ChainWriter::create(&path, &header).map_err(|e| match e {
            ddpmc::Error::Io(source) => CliError::File { path: path.clone(), source },
            e => e.into(),
        })?;
        let chain = run_chain_with(&data, &prior, model, &config.chain, Some(&mut writer))?;
        writer.finish()?;
        chains.push((chain, path));
    } else {
        let runs = run_chains(&data, &prior, model, &config.chain, config.chains)?;
        for (k, chain) in runs.into_iter().enumerate() {
            let path = dir.join(format!("{model}-{k}.chain"));
            write_chain(&chain, &path)?;
            chains.push((chain, path));
        }
    }

    let two_chain = match chains.as_slice() {
        [(a, _), (b, _), ..] => two_chain_z(a.log_posterior(), b.log_posterior()),
        _ => None,
    };
    let report = FitReport {
        model: model.to_string(),
        n_obs: data.n(),
        p: data.p(),
        columns: data.layout().map(|l| l.column_names.clone()).unwrap_or_default(),
        dropped_lines: load.dropped,
        prior,
        gprior,
        chains: chains.iter().map(|(c, p)| summarize(c, p)).collect(),
        log_posterior_two_chain_z: two_chain,
    };
    for s in &report.chains {
        info!("{}: {} draws", s.file, s.draws);
        if let Some(e) = &s.diagnostics_error {
            log::warn!("{}: {e}", s.file);
        }
    }
    let report_path = dir.join(format!("{model}.fit.json"));
    write_json(&report_path, &report)?;

    outputs.extend(chains.into_iter().map(|(_, p)| p));
    outputs.push(report_path);
    let manifest = write_manifest(&dir.join(format!("{model}.fit.manifest.json")), "fit", config, &outputs)?;
    outputs.push(manifest);
    Ok(outputs)
}

fn load_chain(path: &Path) -> Result<Chain> {
    read_chain(path).map_err(|e| match e {
        ddpmc::Error::Io(source) => CliError::File { path: path.to_path_buf(), source },
        e => e.into(),
    })
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "chain".into())
}

#[derive(Debug, Serialize)]
pub struct TauSummary {
    pub chain: String,
    pub model: String,
    pub draws: usize,
    pub grid_points: usize,
    pub level: f64,
    pub n: usize,
    pub test_level: f64,
    /// Threshold z_p applied to |S(τ)|.
    pub threshold: f64,
}

/// Writes `{stem}.tau_curve.csv` (covariates, median, lower, upper),
/// `{stem}.tau_test.csv` (covariates, proportion), `{stem}.tau.json` and
/// `{stem}.tau.manifest.json`, where `stem` is the chain file stem.
pub fn cmd_tau(config: &TauConfig) -> Result<Vec<PathBuf>> {
    let dir = require_out(&config.out_dir)?;
    let chain_path = config.chain.as_deref().ok_or_else(|| CliError::Usage("no chain file given (use --chain)".into()))?;
    if !(0.0..1.0).contains(&config.level) {
        return Err(CliError::Usage(format!("level {} must lie in [0, 1)", config.level)));
    }
    if !(config.test_level > 0.5 && config.test_level < 1.0) {
        return Err(CliError::Usage(format!("test level {} must lie in (0.5, 1)", config.test_level)));
    }
    let chain = load_chain(chain_path)?;
    let (names, grid) = build_grid(&config.grid, chain.layout(), chain.p())?;
    let n = config.n.unwrap_or(chain.header().n_obs);
    let curve = tau_curve(&chain, &grid, config.level)?;
    let test = tau_test_report(&chain, &grid, n, config.test_level)?;
    create_dir(dir)?;

    let stem = file_stem(chain_path);
    let label = |g: &ddpmc::posttau::GridPoint| -> Vec<String> {
        names.iter().map(|k| g.point.get(k).map(|v| v.to_string()).unwrap_or_default()).collect()
    };

    let curve_path = dir.join(format!("{stem}.tau_curve.csv"));
    let mut w = csv_writer(&curve_path)?;
    w.write_record(names.iter().map(String::as_str).chain(["median", "lower", "upper"]))?;
    for (i, g) in grid.iter().enumerate() {
        let mut rec = label(g);
        rec.extend([num(curve.median[i]), num(curve.lower[i]), num(curve.upper[i])]);
        w.write_record(&rec)?;
    }
    w.flush().map_err(CliError::file(&curve_path))?;

    let test_path = dir.join(format!("{stem}.tau_test.csv"));
    let mut w = csv_writer(&test_path)?;
    w.write_record(names.iter().map(String::as_str).chain(["proportion"]))?;
    for (i, g) in grid.iter().enumerate() {
        let mut rec = label(g);
        rec.push(num(test.proportion[i]));
        w.write_record(&rec)?;
    }
    w.flush().map_err(CliError::file(&test_path))?;

    let summary = TauSummary {
        chain: chain_path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        model: chain.kind().to_string(),
        draws: chain.n_draws(),
        grid_points: grid.len(),
        level: config.level,
        n,
        test_level: config.test_level,
        threshold: test.quantile,
    };
    let summary_path = dir.join(format!("{stem}.tau.json"));
    write_json(&summary_path, &summary)?;

    let mut outputs = vec![curve_path, test_path, summary_path];
    let manifest = write_manifest(&dir.join(format!("{stem}.tau.manifest.json")), "tau", config, &outputs)?;
    outputs.push(manifest);
    Ok(outputs)
}

fn read_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let file = fs::File::open(path).map_err(CliError::file(path))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let idx = reader
        .headers()?
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| ddpmc::Error::Schema(format!("{} has no column `{column}`", path.display())))?;
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let cell = rec.get(idx).unwrap_or("");
        let v = cell.parse::<f64>().map_err(|e| ddpmc::Error::Parse {
            row: i + 2,
            column: column.to_string(),
            detail: format!("`{cell}`: {e}"),
        })?;
        out.push(v);
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct CompareEntry {
    pub label: String,
    pub source: String,
    pub il1: f64,
}

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub truth: String,
    pub grid_points: usize,
    /// IL1 by label; chains are labelled by model, curves by file stem.
    pub il1: std::collections::BTreeMap<String, f64>,
    pub entries: Vec<CompareEntry>,
}

/// Integrated L1 distance between each posterior median curve and the truth.
/// Writes the JSON report at `out` and a manifest beside it.
pub fn cmd_compare(config: &CompareConfig) -> Result<Vec<PathBuf>> {
    let out = require_out(&config.out)?;
    let truth_path = config.truth.as_deref().ok_or_else(|| CliError::Usage("no truth file given (use --truth)".into()))?;
    if config.chains.is_empty() && config.curves.is_empty() {
        return Err(CliError::Usage("nothing to compare: give chains or curves".into()));
    }
    let xs = read_column(truth_path, "x")?;
    let truth = read_column(truth_path, "tau_true")?;
    if xs.len() != truth.len() || xs.is_empty() {
        return Err(ddpmc::Error::Schema(format!("{} has an empty or ragged grid", truth_path.display())).into());
    }

    let mut entries: Vec<CompareEntry> = Vec::new();
    for path in &config.chains {
        let chain = load_chain(path)?;
        let grid = single_covariate_grid(chain.layout(), &config.covariate, &xs)?;
        let curve = tau_curve(&chain, &grid, 0.0)?;
        entries.push(CompareEntry {
            label: chain.kind().to_string(),
            source: path.display().to_string(),
            il1: integrated_l1(&curve.median, &truth)?,
        });
    }
    for path in &config.curves {
        let median = read_column(path, "median")?;
        if median.len() != truth.len() {
            return Err(ddpmc::Error::Dimension { expected: truth.len(), got: median.len() }.into());
        }
        entries.push(CompareEntry {
            label: file_stem(path),
            source: path.display().to_string(),
            il1: integrated_l1(&median, &truth)?,
        });
    }

    let mut il1 = std::collections::BTreeMap::new();
    for e in &mut entries {
        let mut label = e.label.clone();
        if il1.contains_key(&label) {
            label = format!("{}:{}", e.label, file_stem(Path::new(&e.source)));
        }
        e.label = label.clone();
        il1.insert(label, e.il1);
    }
    for (k, v) in &il1 {
        info!("IL1 {k} = {v:.4}");
    }
    let report = CompareReport { truth: truth_path.display().to_string(), grid_points: xs.len(), il1, entries };
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    write_json(out, &report)?;
    let manifest_path = out.with_extension("manifest.json");
    let manifest = write_manifest(&manifest_path, "compare", config, &[out.to_path_buf()])?;
    Ok(vec![out.to_path_buf(), manifest])
}
