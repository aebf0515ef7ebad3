use std::f64::consts::PI;
use std::process::{Command, Output};

fn waveguide(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_waveguide"))
        .args(args)
        .env_remove("WAVEGUIDE_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn series_prints_exact_and_decimal_coefficients() {
    let o = waveguide(&["series", "--order", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 5);
    let quartic = &rows[4];
    assert_eq!(quartic[3], "-5120/π⁷ + 1792/(3π⁵) - 8/π³");
    let expected = -5120.0 / PI.powi(7) - 8.0 / PI.powi(3) + 1792.0 / (3.0 * PI.powi(5));
    assert!((quartic[4].parse::<f64>().unwrap() - expected).abs() < 1e-14);
    let quadratic: f64 = rows[2][4].parse().unwrap();
    assert!((quadratic - (2.0 / PI - 16.0 / PI.powi(3))).abs() < 1e-14);
}

#[test]
fn transverse_grid_and_config_line() {
    let o = waveguide(&["transverse", "--mu-range", "-3:3:61", "--branch", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    let config = lines.next().unwrap();
    assert!(config.starts_with("# config: {"));
    assert!(config.contains("\"branch\":1"));
    assert_eq!(lines.next().unwrap(), "mu,k,nu,kind");
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 61);
    let zero = rows.iter().find(|r| r[0] == "0.0").expect("mu = 0 row");
    assert!((zero[1].parse::<f64>().unwrap() - PI / 4.0).abs() < 1e-12);
    assert_eq!(rows[0][3], "hyperbolic");
    assert_eq!(rows[60][3], "oscillatory");
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["dispersion", "--mu", "-0.2", "--xi-range", "-1:1:21", "--branches", "4"];
    let a = waveguide(&args);
    let b = waveguide(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn dispersion_is_even_in_xi() {
    let o = waveguide(&["dispersion", "--mu", "0.3", "--xi-range", "-1:1:5"]);
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 5);
    for (a, b) in rows.iter().zip(rows.iter().rev()) {
        assert_eq!(a[1..], b[1..]);
    }
}

#[test]
fn geometry_file_round_trip_matches_inline() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ellipse.json");
    let p = path.to_str().unwrap();
    assert!(waveguide(&["geometry", "ellipse", "--a", "1.5", "--b", "1", "-o", p]).status.success());
    let from_file = waveguide(&["effective", "--geom", p, "--count", "4"]);
    let inline = waveguide(&["effective", "--geom", "ellipse:1.5,1", "--count", "4"]);
    assert!(from_file.status.success());
    assert_eq!(data_rows(&stdout(&from_file)), data_rows(&stdout(&inline)));
}

#[test]
fn effective_reports_negative_count() {
    let o = waveguide(&["effective", "--geom", "circle:1", "--count", "3"]);
    let text = stdout(&o);
    assert!(text.contains("# negative_count: 1"));
    let lambda1: f64 = data_rows(&text)[0][1].parse().unwrap();
    let ell = 2.0 * PI;
    // lowest level is n = -1: 2π(-1) + π + 2 = 2 - π
    assert!((lambda1 - ((2.0 - PI).powi(2) - 4.0) / (ell * ell)).abs() < 1e-10);
    let shifted = waveguide(&["effective", "--geom", "circle:1", "--flux", "2mπ", "--count", "3"]);
    for (a, b) in data_rows(&stdout(&shifted)).iter().zip(&data_rows(&text)) {
        assert!((a[1].parse::<f64>().unwrap() - b[1].parse::<f64>().unwrap()).abs() < 1e-10);
    }
}

#[test]
fn full2d_emits_report_json() {
    let o = waveguide(&["full2d", "--geom", "circle:1", "--eps", "0.2", "--p", "8", "--nt", "4", "--no-refine"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["command"], "full2d");
    assert_eq!(v["report"]["dimension"], 2 * 4 * 18);
    assert!(v["report"]["symmetry_defect"].as_f64().unwrap() < 1e-8);
}

#[test]
fn verify_prints_checks() {
    let o = waveguide(&[
        "verify", "--geom", "circle:1", "--eps-list", "0.2,0.1", "--m", "0", "--jmax", "2", "--p", "8", "--nt", "4",
        "--no-refine",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("epsilon,j,computed,predicted_fluxA,predicted_fluxB,residualA,residualB"));
    assert_eq!(data_rows(&text).len(), 4);
    assert!(text.contains("# PASS residual decrease j=1"));
    assert!(text.contains("# PASS spectral symmetry"));
    assert!(text.contains("winning_flux: pi+2"));
}

#[test]
fn verify_is_independent_of_worker_count() {
    let args = [
        "verify", "--geom", "ellipse:1.5,1", "--eps-list", "0.2,0.1,0.05", "--jmax", "1", "--p", "6", "--nt", "3",
        "--no-refine",
    ];
    let serial = waveguide(&args);
    let parallel = Command::new(env!("CARGO_BIN_EXE_waveguide"))
        .args(args)
        .env("WAVEGUIDE_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn exit_codes() {
    // malformed flags
    assert_eq!(waveguide(&["transverse", "--mu-range", "1:2"]).status.code(), Some(2));
    assert_eq!(waveguide(&["series", "--bogus"]).status.code(), Some(2));
    // geometry too curved for the width
    assert_eq!(waveguide(&["full2d", "--geom", "circle:1", "--eps", "1.2"]).status.code(), Some(2));
    // truncation visibly not converged
    let o = waveguide(&["full2d", "--geom", "circle:1", "--eps", "0.7", "--p", "4", "--nt", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unknown_geometry_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"variant":"open","L":12,"amp":0.5,"width":1,"extra":1}"#).unwrap();
    let o = waveguide(&["effective", "--geom", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown field"));
}
