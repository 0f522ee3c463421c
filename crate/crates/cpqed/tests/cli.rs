use std::process::Command;

use cpqed::cli::*;

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cpqed").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn csv_column(text: &str, col: usize) -> Vec<f64> {
    text.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

#[test]
fn missing_k0_is_a_config_error() {
    let (code, _, err) = run_cli(&["potential", "--set", "alpha1=1"]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("'k0'"), "{err}");
}

#[test]
fn unknown_keys_are_rejected() {
    let (code, _, err) = run_cli(&["potential", "--set", "k0=1", "--set", "precision=high"]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("precision"), "{err}");
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.cfg");
    std::fs::write(&p, "k0 = 1\nseed = 3\n").unwrap();
    let (code, _, _) = run_cli(&["potential", "--config", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn malformed_and_duplicate_lines() {
    assert!(parse_kv("k0 = 1\nk0 = 2\n").is_err());
    assert!(parse_kv("k0 1\n").is_err());
    let kv = parse_kv("# comment\n\nk0 = 2 # trailing\n").unwrap();
    assert_eq!(kv["k0"], "2");
    let (code, _, _) = run_cli(&["potential", "--set", "k0=abc"]);
    assert_eq!(code, EXIT_CONFIG);
    let (code, _, _) = run_cli(&["potential", "--set", "k0=1", "--set", "mu1=0.1", "--set", "alpha1=1"]);
    assert_eq!(code, EXIT_CONFIG);
    let (code, _, _) = run_cli(&["potential", "--set", "k0=1", "--set", "grid_n_phi=6"]);
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn degenerate_grids_are_config_errors() {
    // one uniform shell on [0.5, 1.5] sits exactly at k0
    let (code, _, err) = run_cli(&[
        "identities", "--set", "k0=1", "--set", "grid_ladder=uniform", "--set", "grid_n_shells=1",
        "--set", "grid_k_min=0.5", "--set", "grid_k_max=1.5",
    ]);
    assert_eq!(code, EXIT_CONFIG, "{err}");
    // probe mode on a grid wavenumber
    let cfg = build_config(Some("k0 = 1\n"), &[], None, None).unwrap();
    let k = cfg.grid.radial[0].0;
    let (code, _, _) = run_cli(&["identities", "--set", "k0=1", "--set", &format!("probe_k={k:?}")]);
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn set_overrides_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("run.cfg");
    std::fs::write(&p, "k0 = 1\nalpha1 = 1\nalpha2 = 1\nr = 2\n").unwrap();
    let (code, out, _) = run_cli(&["potential", "--config", p.to_str().unwrap(), "--set", "r=1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(csv_column(&out, 0), vec![1.0]);
}

#[test]
fn fourth_order_value_at_unit_separation() {
    let (code, out, _) = run_cli(&["potential", "--set", "k0=1", "--set", "alpha1=1", "--set", "alpha2=1", "--set", "r=1"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("r,V,V_4th,rel_dev,err_est\n"));
    let v = csv_column(&out, 1)[0];
    assert!((v + 1.830281).abs() < 1e-6, "{v}");
}

#[test]
fn doubling_r_divides_by_128() {
    let (_, out, _) = run_cli(&[
        "potential", "--set", "k0=1", "--set", "alpha1=1", "--set", "alpha2=1", "--set", "r_min=1", "--set", "r_max=2",
        "--set", "n_r=2",
    ]);
    let v = csv_column(&out, 1);
    assert!((v[0] / v[1] - 128.0).abs() < 1e-10);
}

#[test]
fn user_units_scale_with_k0() {
    // V has dimensions of energy: V(k0 = 2, r) = 2 V(k0 = 1, 2r) at fixed dimensionless α k0³
    let a = |k0: f64, r: f64| -> f64 {
        let alpha = format!("alpha1={:?}", 1.0 / k0.powi(3));
        let alpha2 = format!("alpha2={:?}", 1.0 / k0.powi(3));
        let (_, out, _) = run_cli(&[
            "potential", "--set", &format!("k0={k0:?}"), "--set", &alpha, "--set", &alpha2, "--set", &format!("r={r:?}"),
        ]);
        csv_column(&out, 1)[0]
    };
    let v1 = a(1.0, 2.0);
    let v2 = a(2.0, 1.0);
    assert!((v2 - 2.0 * v1).abs() < 1e-14 * v1.abs());
}

#[test]
fn json_output_parses() {
    let (code, out, _) = run_cli(&["potential", "--set", "k0=1", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["samples"].as_array().unwrap().len(), 5);
    assert_eq!(v["order"], "FourthOrderFarZone");
}

#[test]
fn output_is_deterministic() {
    let args = ["potential", "--set", "k0=1", "--set", "order=all", "--set", "n_r=3"];
    let (c1, a, _) = run_cli(&args);
    let (c2, b, _) = run_cli(&args);
    assert_eq!(c1, EXIT_OK);
    assert_eq!(c2, EXIT_OK);
    assert_eq!(a, b);
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("v.csv");
    let (code, out, _) = run_cli(&["potential", "--set", "k0=1", "--out", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    assert!(std::fs::read_to_string(&p).unwrap().starts_with("r,V"));
}

#[test]
fn identities_pass_on_the_default_grid() {
    let (code, out, err) = run_cli(&["identities", "--set", "k0=1", "--set", "mu1=0.05", "--set", "mu2=0.07", "--set", "r=1.3"]);
    assert_eq!(code, EXIT_OK, "{out}{err}");
    assert_eq!(out.lines().count(), 16);
    assert!(out.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn identities_at_zero_coupling() {
    let (code, out, _) = run_cli(&["identities", "--set", "k0=1", "--set", "alpha1=0", "--set", "alpha2=0"]);
    assert_eq!(code, EXIT_OK, "{out}");
}

#[test]
fn converge_reports_shrinking_errors() {
    let (code, out, err) = run_cli(&["converge", "--set", "k0=1", "--set", "mu1=0.05", "--set", "mu2=0.07", "--set", "r=1.3"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let rows: Vec<(String, f64)> = out
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].to_string(), c[4].parse().unwrap())
        })
        .collect();
    let shells: Vec<f64> = rows.iter().filter(|r| r.0 == "shells_cross_part").map(|r| r.1).collect();
    assert!(shells.len() >= 3);
    assert!(shells.windows(2).all(|w| w[1] < w[0]), "{shells:?}");
    let contour = rows.iter().find(|r| r.0 == "contour_sigma_z").unwrap().1;
    assert!(contour < 1e-12, "{contour}");
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_cpqed");
    let ok = Command::new(exe).args(["potential", "--set", "k0=1"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    let bad = Command::new(exe).args(["potential"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_CONFIG));
    let bad = Command::new(exe).args(["frobnicate"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn unstable_coupling_is_a_convergence_failure() {
    // static self-energy beyond k0² without the counterterm
    let (code, _, err) = run_cli(&[
        "potential", "--set", "k0=1", "--set", "order=all", "--set", "alpha1=0.1", "--set", "alpha2=0.1",
        "--set", "mass_counterterm=false", "--set", "r=10",
    ]);
    assert_eq!(code, EXIT_CONVERGENCE, "{err}");
}
