use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lcf_risk::strain_life::{Material, DEFAULT_N_CAP};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
}

fn lcf(args: &[&str], files: &[(&str, PathBuf)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lcf-risk"));
    cmd.args(args);
    for (flag, path) in files {
        cmd.arg(flag).arg(path);
    }
    cmd.output().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn predict(out: &Path, extra: &[&str], mesh: &str) -> Output {
    let mut args = vec!["predict"];
    args.extend_from_slice(extra);
    lcf(
        &args,
        &[
            ("--mesh", fixture(mesh)),
            ("--material", fixture("material/bracket.json")),
            ("--out-dir", out.to_path_buf()),
        ],
    )
}

#[test]
fn unit_cube_median_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = predict(dir.path(), &["--no-notch-support"], "mesh/unit_cube.json");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("report.json"));
    let material = Material::load(fixture("material/bracket.json")).unwrap();
    let n_det = material
        .solve_cmb(100.0 / 150_000.0, 850.0, DEFAULT_N_CAP)
        .unwrap()
        .cycles;
    let m = material.m;
    let expected = n_det * std::f64::consts::LN_2.powf(1.0 / m) * 6f64.powf(-1.0 / m);
    let median = report["runs"][0]["distribution"]["median"].as_f64().unwrap();
    assert!((median / expected - 1.0).abs() < 1e-10, "{median} vs {expected}");
    assert_eq!(report["runs"][0]["label"], "plain");
    for name in ["hazard_plain.csv", "cdf.csv", "surface_fields.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn homogeneous_field_compare_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    assert!(predict(dir.path(), &["--compare"], "mesh/unit_cube.json")
        .status
        .success());
    let report = json(&dir.path().join("report.json"));
    let runs = &report["runs"];
    assert_eq!(runs[0]["distribution"]["eta"], runs[1]["distribution"]["eta"]);
    assert_eq!(report["comparison"]["median_ratio"].as_f64().unwrap(), 1.0);
}

#[test]
fn bracket_compare_favors_notch_support() {
    let dir = tempfile::tempdir().unwrap();
    assert!(predict(dir.path(), &["--compare"], "mesh/bracket.json")
        .status
        .success());
    let report = json(&dir.path().join("report.json"));
    let ratio = report["comparison"]["median_ratio"].as_f64().unwrap();
    assert!(ratio > 1.0, "{ratio}");
    let size = |i: usize| {
        report["runs"][i]["distribution"]["size_effect_factor"]
            .as_f64()
            .unwrap()
    };
    assert!(size(0) > size(1));
    let cdf = csv_rows(&dir.path().join("cdf.csv"));
    assert_eq!(cdf.len(), 200);
    for row in &cdf {
        let (notch, plain): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
        assert!(notch <= plain);
    }
}

#[test]
fn outputs_embed_provenance() {
    let dir = tempfile::tempdir().unwrap();
    assert!(predict(dir.path(), &[], "mesh/bracket.json").status.success());
    let report = json(&dir.path().join("report.json"));
    let prov = &report["provenance"];
    assert_eq!(prov["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(prov["config"]["quad_degree"], 5);
    assert_eq!(prov["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    for name in ["hazard_notch_support.csv", "cdf.csv", "surface_fields.csv"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.starts_with("# {\"tool\":\"lcf-risk-cli\""), "{name}");
    }
    let header = std::fs::read_to_string(dir.path().join("surface_fields.csv")).unwrap();
    assert!(header.lines().nth(1).unwrap().ends_with("chi,chi_T"));
}

#[test]
fn subsets_add_up_at_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let out = predict(
        dir.path(),
        &["--subset", "x<2", "--subset", "x>=2"],
        "mesh/bracket.json",
    );
    assert!(out.status.success());
    let report = json(&dir.path().join("report.json"));
    let subsets = report["runs"][0]["subsets"].as_array().unwrap();
    let total: f64 = subsets.iter().map(|s| s["hazard_fraction"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12, "{total}");
    let points: u64 = subsets.iter().map(|s| s["points"].as_u64().unwrap()).sum();
    assert_eq!(points, report["mesh"]["integration_points"].as_u64().unwrap());
}

#[test]
fn empty_subset_and_bad_inputs_exit_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = predict(dir.path(), &["--subset", "x>100"], "mesh/bracket.json");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("x>100"));
    let out = predict(dir.path(), &["--quad-degree", "4"], "mesh/bracket.json");
    assert_eq!(out.status.code(), Some(2));
    let out = predict(dir.path(), &[], "calibration/profiles.json");
    assert_eq!(out.status.code(), Some(2));
    let out = predict(dir.path(), &["--compare", "--no-notch-support"], "mesh/bracket.json");
    assert_eq!(out.status.code(), Some(2));
}

fn calibrate(out: &Path, extra: &[&str], dataset: PathBuf) -> Output {
    let mut args = vec!["calibrate"];
    args.extend_from_slice(extra);
    lcf(
        &args,
        &[
            ("--dataset", dataset),
            ("--profiles", fixture("calibration/profiles.json")),
            ("--material", fixture("calibration/start.json")),
            ("--out-dir", out.to_path_buf()),
        ],
    )
}

#[test]
fn missing_profile_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("calibration/dataset.csv")).unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, text.replacen("notch_r2.4", "notch_r9", 1)).unwrap();
    let out = calibrate(dir.path(), &[], bad);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("notch_r9"));
}

#[test]
fn bootstrap_below_minimum_is_rejected_before_fitting() {
    let dir = tempfile::tempdir().unwrap();
    let out = calibrate(dir.path(), &["--bootstrap", "50"], fixture("calibration/dataset.csv"));
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("fit.json").exists());
}

#[test]
fn iteration_starved_fit_exits_with_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = calibrate(
        dir.path(),
        &["--max-iterations", "5", "--bootstrap", "100"],
        fixture("calibration/dataset.csv"),
    );
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("fit.json"));
    assert_eq!(report["fit"]["converged"], false);
    assert!(report["bootstrap"].is_null());
    assert!(dir.path().join("fitted_material.json").exists());
}

#[test]
fn calibrate_writes_fit_and_material() {
    let dir = tempfile::tempdir().unwrap();
    let out = calibrate(dir.path(), &["--seed", "3"], fixture("calibration/dataset.csv"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("fit.json"));
    assert_eq!(report["fit"]["converged"], true);
    assert_eq!(report["provenance"]["seed"], 3);
    assert_eq!(report["records"], 100);
    let fitted = Material::load(dir.path().join("fitted_material.json")).unwrap();
    let sigma_f = report["fit"]["theta"]["sigma_f"].as_f64().unwrap();
    assert_eq!(fitted.at(850.0).cmb.sigma_f, sigma_f);
    assert!(!dir.path().join("spaghetti.csv").exists());
}

#[test]
fn encurve_uniform_unit_area_is_shifted_cmb_curve() {
    let dir = tempfile::tempdir().unwrap();
    let profiles = dir.path().join("profiles.json");
    std::fs::write(
        &profiles,
        r#"[{"id": "unit", "area": 1.0}, {"id": "notch", "rows": [[0.5, 1.0, 2.0], [0.5, 1.0, 0.5]]},
            {"id": "notch_flat", "rows": [[0.5, 1.0, 0.0], [0.5, 1.0, 0.0]]}]"#,
    )
    .unwrap();
    let csv = dir.path().join("curve.csv");
    let out = lcf(
        &[
            "encurve",
            "--eps-min",
            "0.003",
            "--eps-max",
            "0.012",
            "--points",
            "10",
            "--quantile",
            "0.05",
            "--quantile",
            "0.5",
            "--quantile",
            "0.95",
        ],
        &[
            ("--material", fixture("material/bracket.json")),
            ("--profiles", profiles),
            ("--out", csv.clone()),
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 3 * 3 * 10);
    let material = Material::load(fixture("material/bracket.json")).unwrap();
    let get = |id: &str, p: &str| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| r[0] == id && r[2] == p)
            .map(|r| (r[1].parse().unwrap(), r[3].parse().unwrap()))
            .collect()
    };
    let shift = std::f64::consts::LN_2.powf(1.0 / material.m);
    for (eps, n) in get("unit", "0.5") {
        let det = material.solve_cmb(eps, 850.0, DEFAULT_N_CAP).unwrap().cycles;
        assert!((n / (det * shift) - 1.0).abs() < 1e-12);
    }
    for id in ["unit", "notch"] {
        let (lo, mid, hi) = (get(id, "0.05"), get(id, "0.5"), get(id, "0.95"));
        for i in 0..10 {
            assert!(lo[i].1 < mid[i].1 && mid[i].1 < hi[i].1);
        }
    }
    for (a, b) in get("notch", "0.5").iter().zip(get("notch_flat", "0.5")) {
        assert!(a.1 >= b.1);
    }
}

#[test]
fn validate_reports_each_input() {
    let out = lcf(
        &["validate"],
        &[
            ("--mesh", fixture("mesh/bracket.json")),
            ("--material", fixture("material/bracket.json")),
            ("--dataset", fixture("calibration/dataset.csv")),
            ("--profiles", fixture("calibration/profiles.json")),
        ],
    );
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for word in [
        "material: ok",
        "mesh: ok",
        "profiles: ok",
        "dataset: ok",
        "references resolved",
    ] {
        assert!(text.contains(word), "{text}");
    }
    assert_eq!(lcf(&["validate"], &[]).status.code(), Some(2));
    let bad = lcf(&["validate"], &[("--material", fixture("mesh/bracket.json"))]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn help_documents_schemas() {
    let out = lcf(&["--help"], &[]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("profile_id,eps_a,temp_C,n_obs,censored"));
    assert!(text.contains("Exit codes"));
}
