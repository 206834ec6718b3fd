use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ddpmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddpmc"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate(dir: &Path, seed: &str) {
    let out = ddpmc(&["simulate", "--scenario", "I", "--n", "250", "--seed", seed, "--grid-points", "20", "--out", path(dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

fn short_fit(dir: &Path, model: &str, extra: &[&str]) -> Output {
    let data = dir.join("data.csv");
    let mut args = vec![
        "fit", "--data", path(&data), "--model", model, "--iterations", "1200", "--burn-in", "200", "--thin", "4",
        "--truncation", "8", "--seed", "3", "--out", path(dir),
    ];
    args.extend_from_slice(extra);
    ddpmc(&args)
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(p).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn simulate_writes_three_reproducible_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    simulate(a.path(), "7");
    simulate(b.path(), "7");
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names, ["data.csv", "simulate.manifest.json", "truth.csv"]);
    assert_eq!(csv_rows(&a.path().join("data.csv")).len(), 250);
    assert_eq!(csv_rows(&a.path().join("truth.csv")).len(), 20);
    for f in ["data.csv", "truth.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
    }

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.path().join("simulate.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 7);
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);

    let c = tempfile::tempdir().unwrap();
    simulate(c.path(), "8");
    assert_ne!(fs::read(a.path().join("data.csv")).unwrap(), fs::read(c.path().join("data.csv")).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&ddpmc(&["simulate", "--scenario", "III", "--out", path(dir.path())])), 2);
    assert_eq!(code(&ddpmc(&["simulate", "--scenario", "I"])), 2);
    assert_eq!(code(&ddpmc(&["fit", "--iterations", "10", "--burn-in", "20", "--data", "x.csv", "--out", "o"])), 2);
    assert_eq!(code(&ddpmc(&["frobnicate"])), 2);
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    let out = ddpmc(&["fit", "--data", path(&missing), "--out", path(dir.path())]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.csv"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "y1,y2,z\n1,2,3\n2,3,4\n").unwrap();
    assert_eq!(code(&ddpmc(&["fit", "--data", path(&bad), "--out", path(dir.path())])), 3);
}

#[test]
fn sampler_abort_exits_4_with_iteration() {
    let dir = tempfile::tempdir().unwrap();
    simulate(dir.path(), "5");
    let cfg = dir.path().join("fit.json");
    fs::write(&cfg, r#"{"chain": {"max_shrink_steps": 1, "width_sds": 1000.0}}"#).unwrap();
    let out = short_fit(dir.path(), "ddpmc", &["--config", path(&cfg)]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("iteration"));
}

#[test]
fn fit_tau_compare_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    simulate(d, "7");
    for model in ["ddpmc", "ldvr"] {
        let out = short_fit(d, model, &[]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("ddpmc.fit.json")).unwrap()).unwrap();
    assert_eq!(report["chains"][0]["draws"], 250);
    assert_eq!(report["p"], 2);
    assert!(report["chains"][0]["diagnostics"].is_array());

    let chain = d.join("ddpmc.chain");
    let narrow = d.join("narrow");
    let wide = d.join("wide");
    for (level, out) in [("0.90", &narrow), ("0.95", &wide)] {
        let o = ddpmc(&["tau", "--chain", path(&chain), "--points", "20", "--level", level, "--out", path(out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let n = csv_rows(&narrow.join("ddpmc.tau_curve.csv"));
    let w = csv_rows(&wide.join("ddpmc.tau_curve.csv"));
    assert_eq!(n.len(), 20);
    for (a, b) in n.iter().zip(&w) {
        let f = |s: &str| s.parse::<f64>().unwrap();
        assert_eq!(a[1], b[1]);
        assert!(f(&b[2]) <= f(&a[2]) && f(&a[3]) <= f(&b[3]));
    }
    assert_eq!(csv_rows(&wide.join("ddpmc.tau_test.csv")).len(), 20);
    assert!(wide.join("ddpmc.tau.manifest.json").is_file());

    // A chain and its own median curve give the same IL1.
    let cmp = d.join("cmp.json");
    let curve = wide.join("ddpmc.tau_curve.csv");
    let o = ddpmc(&[
        "compare", "--truth", path(&d.join("truth.csv")), "--chain", path(&chain), "--chain",
        path(&d.join("ldvr.chain")), "--curve", path(&curve), "--out", path(&cmp),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cmp).unwrap()).unwrap();
    let il1 = &r["il1"];
    assert_eq!(il1["ddpmc"].as_f64().unwrap(), il1["ddpmc.tau_curve"].as_f64().unwrap());
    assert!(il1["ldvr"].as_f64().unwrap() > 0.0);
    assert!(d.join("cmp.manifest.json").is_file());

    let short = d.join("short.csv");
    fs::write(&short, "x,median\n0.5,0.1\n").unwrap();
    let o = ddpmc(&["compare", "--truth", path(&d.join("truth.csv")), "--curve", path(&short), "--out", path(&cmp)]);
    assert_eq!(code(&o), 3);
}

#[test]
fn one_point_grid_on_a_degenerate_chain() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    simulate(d, "2");
    // Zero slice widths are rejected, so a tiny width freezes the chain near its start.
    let cfg = d.join("fit.json");
    fs::write(&cfg, r#"{"chain": {"width_sds": 1e-12}}"#).unwrap();
    let out = short_fit(d, "ddpmc", &["--config", path(&cfg)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let grid = d.join("grid.json");
    fs::write(&grid, r#"{"kind": "rows", "rows": [[1.0, 0.5]]}"#).unwrap();
    let o = ddpmc(&["tau", "--chain", path(&d.join("ddpmc.chain")), "--grid", path(&grid), "--out", path(d)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&d.join("ddpmc.tau_curve.csv"));
    assert_eq!(rows.len(), 1);
    let t: f64 = rows[0][1].parse().unwrap();
    assert!(t.abs() < 1e-6, "start state has rho = 0, got tau {t}");
}

#[test]
fn multiple_chains_use_distinct_streams() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    simulate(d, "4");
    let out = short_fit(d, "ldvr", &["--chains", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let a = fs::read(d.join("ldvr-0.chain")).unwrap();
    let b = fs::read(d.join("ldvr-1.chain")).unwrap();
    assert_ne!(a, b);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("ldvr.fit.json")).unwrap()).unwrap();
    assert_eq!(report["chains"][1]["stream"], 1);
    assert!(report["log_posterior_two_chain_z"].is_number());
}

#[test]
fn gprior_fit_on_a_categorical_design() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut text = String::from("a,b,t,grp\n");
    for i in 0..80 {
        let x = i as f64 / 80.0;
        text.push_str(&format!("{},{},{},{}\n", (i * 37 % 80) as f64, (i * 11 % 80) as f64 + x, x * 3.0, ["u", "v", "w"][i % 3]));
    }
    fs::write(d.join("data.csv"), text).unwrap();
    let cfg = d.join("fit.json");
    fs::write(
        &cfg,
        r#"{"schema": {"y1": "a", "y2": "b", "covariates": {"continuous": ["t"],
            "categorical": [{"name": "grp", "levels": ["u", "v", "w"]}]}},
           "prior": {"kind": "gprior", "c_rho": 2.0},
           "filter": {"column": "t", "lower": 0.1, "upper": 0.9}}"#,
    )
    .unwrap();
    let out = short_fit(d, "ddpmc", &["--config", path(&cfg)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("ddpmc.fit.json")).unwrap()).unwrap();
    assert_eq!(report["p"], 4);
    assert_eq!(report["gprior"]["c_rho"], 2.0);
    assert!(report["gprior"]["c_v"].as_f64().unwrap() > 0.0);
    assert!(report["n_obs"].as_u64().unwrap() < 80);

    let grid = d.join("grid.json");
    fs::write(&grid, r#"{"kind": "product", "axes": [{"name": "grp", "values": ["u", "v", "w"]},
        {"name": "t", "range": [0.5, 2.5], "points": 4}]}"#)
        .unwrap();
    let o = ddpmc(&["tau", "--chain", path(&d.join("ddpmc.chain")), "--grid", path(&grid), "--out", path(d)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&d.join("ddpmc.tau_curve.csv"));
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[0][0], "u");
    assert_eq!(rows[4][0], "v");

    fs::write(&grid, r#"{"kind": "product", "axes": [{"name": "grp", "values": ["z"]}]}"#).unwrap();
    let o = ddpmc(&["tau", "--chain", path(&d.join("ddpmc.chain")), "--grid", path(&grid), "--out", path(d)]);
    assert_eq!(code(&o), 3);
}
