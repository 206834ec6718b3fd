//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.
//!
//! Run with `cargo test -p ddpmc-cli --test acceptance -- --nocapture`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ddpmc::copula::{concordance_tau, mixture_tau, sample_gaussian_copula};
use ddpmc::data::PseudoDataset;
use ddpmc::mcmc::{chain_header, read_chain, ChainConfig, ChainWriter, HyperrectSlice};
use ddpmc::model::{ddpmc_loglik, DdpmcState, ModelKind, ModelState, PriorSpec};
use ddpmc::numerics::{bivariate_normal_cdf, std_normal_cdf, std_normal_quantile, RngStream};
use ddpmc::posttau::{exceedance_proportion, tau_test_statistic};
use ddpmc::simulation::{Scenario, ScenarioConfig};
use ddpmc::{Mixture, UnitPair};
use ddpmc_cli::config::{CompareConfig, FitConfig, PriorChoice, SimulateConfig, TauConfig};
use ddpmc_cli::grid::{Axis, GridSpec};
use ddpmc_cli::{cmd_compare, cmd_fit, cmd_simulate, cmd_tau};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (header, rows) = read_csv(path);
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..10_000 {
        let p = (k as f64 + 0.5) / 10_000.0;
        let z = std_normal_quantile(p).map_err(err)?;
        worst = worst.max((std_normal_cdf(z).map_err(err)? - p).abs());
    }
    let mut worst_bvn: f64 = 0.0;
    for k in -9..=9 {
        let rho = k as f64 / 10.0;
        let exact = 0.25 + rho.asin() / (2.0 * std::f64::consts::PI);
        worst_bvn = worst_bvn.max((bivariate_normal_cdf(0.0, 0.0, rho).map_err(err)? - exact).abs());
    }
    check(worst < 1e-10 && worst_bvn < 1e-7, format!("round-trip error {worst:.2e}, orthant error {worst_bvn:.2e}"))
}

fn criterion_2() -> Outcome {
    let mut rng = RngStream::new(2024, 0);
    let mut within = 0;
    for case in 0..50u64 {
        let k = rng.random_range(1..=10);
        let raw: Vec<f64> = (0..k).map(|_| rng.open01() + 0.05).collect();
        let total: f64 = raw.iter().sum();
        let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let head: f64 = weights[..k - 1].iter().sum();
        weights[k - 1] = 1.0 - head;
        let rhos: Vec<f64> = (0..k).map(|_| 1.9 * rng.open01() - 0.95).collect();
        let m = Mixture::new(weights.clone(), rhos.clone()).map_err(err)?;
        let exact = mixture_tau(&m);
        let mut mc_rng = RngStream::new(2024, 1 + case);
        let est = concordance_tau(1_000_000, &mut mc_rng, |r| {
            let u = r.open01();
            let mut acc = 0.0;
            let j = weights.iter().position(|w| {
                acc += w;
                u <= acc
            });
            sample_gaussian_copula(rhos[j.unwrap_or(k - 1)], r)
        })
        .map_err(err)?;
        if (exact - est.tau).abs() < 3.0 * est.std_error {
            within += 1;
        }
    }
    check(within >= 48, format!("{within}/50 mixtures within 3 MC standard errors"))
}

struct DeskRun {
    il1_ddpmc: f64,
    il1_ldvr: f64,
    coverage: usize,
    grid: usize,
    seconds: f64,
}

fn desk_run(dir: &Path, scenario: Scenario) -> Result<DeskRun, String> {
    let start = Instant::now();
    let sim = SimulateConfig {
        scenario: ScenarioConfig { scenario, n: 250, seed: 7, ..ScenarioConfig::default() },
        grid_points: 100,
        out_dir: Some(dir.to_path_buf()),
    };
    cmd_simulate(&sim).map_err(err)?;
    for model in [ModelKind::Ddpmc, ModelKind::Ldvr] {
        let fit = FitConfig {
            data: Some(dir.join("data.csv")),
            model,
            chain: ChainConfig { seed: 7, ..ChainConfig::default() },
            out_dir: Some(dir.to_path_buf()),
            ..FitConfig::default()
        };
        cmd_fit(&fit).map_err(err)?;
        let tau = TauConfig { chain: Some(dir.join(format!("{model}.chain"))), out_dir: Some(dir.to_path_buf()), ..TauConfig::default() };
        cmd_tau(&tau).map_err(err)?;
    }
    let out = dir.join("compare.json");
    let cmp = CompareConfig {
        truth: Some(dir.join("truth.csv")),
        chains: vec![dir.join("ddpmc.chain"), dir.join("ldvr.chain")],
        out: Some(out.clone()),
        ..CompareConfig::default()
    };
    cmd_compare(&cmp).map_err(err)?;
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).map_err(err)?).map_err(err)?;
    let truth = column(&dir.join("truth.csv"), "tau_true");
    let curve = dir.join("ddpmc.tau_curve.csv");
    let (lower, upper) = (column(&curve, "lower"), column(&curve, "upper"));
    let coverage = truth.iter().zip(lower.iter().zip(&upper)).filter(|(t, (l, u))| *l <= *t && *t <= *u).count();
    Ok(DeskRun {
        il1_ddpmc: report["il1"]["ddpmc"].as_f64().ok_or("missing ddpmc IL1")?,
        il1_ldvr: report["il1"]["ldvr"].as_f64().ok_or("missing ldvr IL1")?,
        coverage,
        grid: truth.len(),
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn criterion_6(dir: &Path) -> Outcome {
    let s = tau_test_statistic(0.1, 246).map_err(err)?;
    let n = 246;
    let z = std_normal_quantile(0.975).map_err(err)?;
    let threshold = z * (2.0 * (2.0 * n as f64 + 5.0) / (9.0 * n as f64 * (n as f64 - 1.0))).sqrt();
    let empty = PseudoDataset::new(vec![], vec![], 2).map_err(err)?;
    let prior = PriorSpec::simulation(2);
    let cfg = ChainConfig { iterations: 20, burn_in: 0, thin: 1, truncation: 2, ..ChainConfig::default() };
    let mut props = Vec::new();
    for (k, tau) in [0.97 * threshold, 1.03 * threshold].into_iter().enumerate() {
        // A single-correlation state: η = (1 − ρ)/(1 + ρ) with ρ = sin(πτ/2).
        let rho = (tau * std::f64::consts::FRAC_PI_2).sin();
        let state = ModelState::Ddpmc(DdpmcState::constant(2, &[0.0, 0.0], &[(1.0 - rho) / (1.0 + rho), 0.0]).map_err(err)?);
        let path = dir.join(format!("constant-{k}.chain"));
        let header = chain_header(&empty, &prior, ModelKind::Ddpmc, &cfg).map_err(err)?;
        let mut w = ChainWriter::create(&path, &header).map_err(err)?;
        for _ in 0..20 {
            let mut rec = state.to_flat();
            rec.push(0.0);
            w.write_record(&rec).map_err(err)?;
        }
        w.finish().map_err(err)?;
        let chain = read_chain(&path).map_err(err)?;
        props.push(exceedance_proportion(&chain, &[1.0, 0.3], n, 0.975).map_err(err)?);
    }
    check(
        (s - 2.3360).abs() < 1e-3 && props == [0.0, 1.0],
        format!("S(0.1, 246) = {s:.6}; exceedance below/above threshold = {}/{}", props[0], props[1]),
    )
}

fn criterion_7(dir: &Path) -> Outcome {
    let sim = SimulateConfig {
        scenario: ScenarioConfig { n: 60, seed: 3, ..ScenarioConfig::default() },
        grid_points: 5,
        out_dir: Some(dir.join("sim")),
    };
    cmd_simulate(&sim).map_err(err)?;
    let mut identical = true;
    for model in [ModelKind::Ddpmc, ModelKind::Ldvr] {
        let mut bytes = Vec::new();
        for run in ["a", "b"] {
            let fit = FitConfig {
                data: Some(dir.join("sim/data.csv")),
                model,
                chain: ChainConfig { iterations: 600, burn_in: 100, thin: 2, truncation: 6, seed: 11, ..ChainConfig::default() },
                out_dir: Some(dir.join(run)),
                ..FitConfig::default()
            };
            cmd_fit(&fit).map_err(err)?;
            bytes.push(fs::read(dir.join(run).join(format!("{model}.chain"))).map_err(err)?);
        }
        identical &= bytes[0] == bytes[1];
    }

    let slice = HyperrectSlice::new(vec![5.0], 1000).map_err(err)?;
    let mut rng = RngStream::new(99, 0);
    let target = |x: &[f64]| Ok(-0.5 * x[0] * x[0]);
    let (mut x, mut fx) = (vec![0.0], 0.0);
    let (mut s1, mut s2) = (0.0, 0.0);
    let m = 100_000;
    for _ in 0..m {
        let st = slice.step(target, &x, fx, &mut rng).map_err(err)?;
        x = st.x;
        fx = st.log_target;
        s1 += x[0];
        s2 += x[0] * x[0];
    }
    let mean = s1 / m as f64;
    let var = s2 / m as f64 - mean * mean;
    check(
        identical && mean.abs() <= 0.02 && (var - 1.0).abs() <= 0.03,
        format!("chain files identical: {identical}; slice mean {mean:.4}, variance {var:.4}"),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = RngStream::new(8, 0);
    let data_rng = &mut RngStream::new(8, 1);
    let n_data = 25;
    let pairs: Vec<UnitPair> = (0..n_data).map(|_| UnitPair::new(data_rng.open01(), data_rng.open01()).unwrap()).collect();
    let mut worst_sum: f64 = 0.0;
    let mut bad = Vec::new();
    for s in 0..1_000_000usize {
        let n = rng.random_range(2..=20);
        let p = rng.random_range(2..=7);
        let scale = [0.5, 3.0, 40.0][s % 3];
        let mut draw = |len: usize| -> Vec<f64> {
            (0..len).map(|_| { let z: f64 = StandardNormal.sample(&mut rng); scale * z }).collect::<Vec<f64>>()
        };
        let beta_v: Vec<Vec<f64>> = (0..n - 1).map(|_| draw(p)).collect();
        let beta_rho: Vec<Vec<f64>> = (0..n).map(|_| draw(p)).collect();
        let state = DdpmcState::new(beta_v, beta_rho).map_err(err)?;
        let mut x = vec![1.0];
        x.extend((1..p).map(|_| 4.0 * rng.open01() - 2.0));
        let m = ModelState::Ddpmc(state.clone()).mixture_at_x(&x).map_err(err)?;
        worst_sum = worst_sum.max((m.weights().iter().sum::<f64>() - 1.0).abs());
        for j in 0..n - 1 {
            let v = ddpmc::model::v_of_x(&x, &state.beta_v()[j]).map_err(err)?;
            if !(v > 0.0 && v < 1.0) {
                bad.push(format!("v = {v}"));
            }
        }
        if let Some(r) = m.rhos().iter().find(|r| !(**r > -1.0 && **r <= 1.0 - 1e-6)) {
            bad.push(format!("rho = {r}"));
        }
        let u = UnitPair::new(rng.open01(), rng.open01()).unwrap();
        if !m.log_density(u).map_err(err)?.is_finite() {
            bad.push("non-finite log density".into());
        }
        if s % 100 == 0 {
            let design = (0..n_data).map(|_| x.clone()).collect();
            let data = PseudoDataset::new(pairs.clone(), design, p).map_err(err)?;
            if let Err(e) = ddpmc_loglik(&data, &state) {
                bad.push(e.to_string());
            }
        }
        if bad.len() > 5 {
            break;
        }
    }
    check(
        worst_sum <= 1e-12 && bad.is_empty(),
        format!("max |Σw − 1| = {worst_sum:.2e}; violations: {}", if bad.is_empty() { "none".into() } else { bad.join(", ") }),
    )
}

/// A synthetic stand-in for the private application data: two markers, two
/// continuous predictors, sex and a four-band age grouping.
fn write_application_data(path: &Path) {
    let mut rng = RngStream::new(246, 0);
    let mut w = csv::Writer::from_path(path).unwrap();
    w.write_record(["cimt", "hba1c", "triglycerides", "bmi", "sex", "age"]).unwrap();
    for _ in 0..246 {
        let tg = 60.0 + 220.0 * rng.open01();
        let bmi = 18.0 + 18.0 * rng.open01();
        let sex = if rng.open01() < 0.5 { "male" } else { "female" };
        let age = 45.0 + 30.0 * rng.open01();
        let rho = 0.6 * (tg - 60.0) / 220.0 - 0.1;
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        let cimt = 0.7 + 0.1 * z1;
        let hba1c = 5.5 + 0.4 * (rho * z1 + (1.0 - rho * rho).sqrt() * z2);
        w.write_record([
            format!("{cimt:.4}"),
            format!("{hba1c:.3}"),
            format!("{tg:.1}"),
            format!("{bmi:.1}"),
            sex.to_string(),
            format!("{age:.1}"),
        ])
        .unwrap();
    }
    w.flush().unwrap();
}

fn criterion_9(dir: &Path) -> Outcome {
    let data = dir.join("application.csv");
    write_application_data(&data);
    let fit: FitConfig = serde_json::from_value(serde_json::json!({
        "data": data,
        "schema": {
            "y1": "cimt",
            "y2": "hba1c",
            "covariates": {
                "continuous": ["triglycerides", "bmi"],
                "categorical": [{"name": "sex", "levels": ["male", "female"]}],
                "discretizations": [{
                    "source": "age", "name": "age_group",
                    "cuts": [55.0, 60.0, 65.0], "labels": ["<55", "55-60", "60-65", ">=65"]
                }]
            }
        },
        "prior": {"kind": "gprior"},
        "chain": {"iterations": 4000, "burn_in": 2000, "thin": 4, "seed": 5},
        "out_dir": dir,
    }))
    .map_err(err)?;
    assert!(matches!(fit.prior, PriorChoice::Gprior { .. }));
    cmd_fit(&fit).map_err(err)?;
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("ddpmc.fit.json")).map_err(err)?).map_err(err)?;
    let p = report["p"].as_u64().unwrap_or(0);
    let c_v = report["gprior"]["c_v"].as_f64().unwrap_or(0.0);
    let c_rho = report["gprior"]["c_rho"].as_f64().unwrap_or(0.0);

    let label = |s: &str| serde_json::Value::String(s.into());
    let num = |v: f64| serde_json::json!(v);
    let axis = |name: &str, values: Vec<serde_json::Value>| Axis {
        name: name.into(),
        values: values.into_iter().map(|v| serde_json::from_value(v).unwrap()).collect(),
        range: None,
        points: None,
    };
    let grid = GridSpec::Product {
        axes: vec![
            axis("sex", vec![label("male"), label("female")]),
            axis("age_group", ["<55", "55-60", "60-65", ">=65"].into_iter().map(label).collect()),
            axis("bmi", vec![num(22.0), num(27.0), num(32.0)]),
            Axis { name: "triglycerides".into(), values: vec![], range: Some([80.0, 250.0]), points: Some(18) },
        ],
    };
    let tau = TauConfig {
        chain: Some(dir.join("ddpmc.chain")),
        grid,
        out_dir: Some(dir.to_path_buf()),
        ..TauConfig::default()
    };
    cmd_tau(&tau).map_err(err)?;
    let (header, rows) = read_csv(&dir.join("ddpmc.tau_curve.csv"));
    let bmis: std::collections::BTreeSet<String> = rows.iter().map(|r| r[2].clone()).collect();
    check(
        p == 7 && c_v > 0.0 && c_rho > 0.0 && rows.len() == 2 * 4 * 3 * 18 && bmis.len() == 3 && header[2] == "bmi",
        format!(
            "p = {p}, g-prior c_v = {c_v:.3}, c_rho = {c_rho:.3}, tau rows = {} with BMI levels {:?}",
            rows.len(),
            bmis
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let tmp = tempfile::tempdir().unwrap();
    let sub = |name: &str| -> PathBuf {
        let d = tmp.path().join(name);
        fs::create_dir_all(&d).unwrap();
        d
    };

    let mut results: Vec<(usize, Outcome)> = vec![(1, criterion_1()), (2, criterion_2())];

    match desk_run(&sub("scenario-1"), Scenario::I) {
        Ok(r) => {
            results.push((
                3,
                check(
                    r.il1_ddpmc <= 0.10 && r.il1_ddpmc < r.il1_ldvr,
                    format!("IL1 DDPMC {:.4} vs LDVR {:.4} ({:.0}s)", r.il1_ddpmc, r.il1_ldvr, r.seconds),
                ),
            ));
            results.push((
                4,
                check(10 * r.coverage >= 9 * r.grid, format!("true tau inside the 95% band at {}/{} points", r.coverage, r.grid)),
            ));
        }
        Err(e) => {
            results.push((3, Err(e.clone())));
            results.push((4, Err(e)));
        }
    }
    results.push((
        5,
        desk_run(&sub("scenario-2"), Scenario::II).and_then(|r| {
            check(
                r.il1_ddpmc <= 0.06 && r.il1_ldvr <= 0.06,
                format!("IL1 DDPMC {:.4}, LDVR {:.4} ({:.0}s)", r.il1_ddpmc, r.il1_ldvr, r.seconds),
            )
        }),
    ));
    results.push((6, criterion_6(&sub("constant"))));
    results.push((7, criterion_7(&sub("determinism"))));
    results.push((8, criterion_8()));
    results.push((9, criterion_9(&sub("application"))));

    results.sort_by_key(|(k, _)| *k);
    let mut failed = Vec::new();
    for (k, outcome) in &results {
        match outcome {
            Ok(d) => println!("criterion {k}: PASS  {d}"),
            Err(d) => {
                println!("criterion {k}: FAIL  {d}");
                failed.push(*k);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
