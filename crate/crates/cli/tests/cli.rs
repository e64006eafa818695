use std::fs;
use std::path::{Path, PathBuf};

use assert_cmd::Command;
use heatrobin::commands::render_csv;
use heatrobin::report::{Report, SolutionRecord};
use proptest::prelude::*;
use serde_json::{json, Value};

fn bin() -> Command {
    let mut cmd = Command::cargo_bin("heatrobin").unwrap();
    cmd.env_remove("HEATROBIN_THREADS");
    cmd
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn write_config(dir: &Path, config: &Value) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_string_pretty(config).unwrap()).unwrap();
    path
}

fn ex2_config() -> Value {
    json!({
        "k": 0.25, "nu": 0.5, "l": 1, "T": 1,
        "boundary": "neumann_robin",
        "mu0": [1, 0, 2],
        "F": [[0, 2, 3]],
        "T0": [5, 1, 1, 1]
    })
}

fn read_csv(path: &Path) -> Vec<[f64; 3]> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,t,u"));
    lines
        .map(|line| {
            let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect()
}

fn read_report(path: &Path) -> Report {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn solve_into(config: &Path, out: &Path) {
    bin()
        .args(["solve", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .assert()
        .success();
}

#[test]
fn ex2_grid_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    solve_into(&example("ex2.json"), dir.path());
    let rows = read_csv(&dir.path().join("solution.csv"));
    assert_eq!(rows.len(), 41 * 41);
    // time-major
    assert_eq!((rows[1][0], rows[1][1]), (0.025, 0.0));
    assert_eq!((rows[41][0], rows[41][1]), (0.0, 0.025));
    for [x, t, u] in rows {
        let exact = 2.0 * x * x + t * t * t + t * t + t + 1.0;
        assert!((u - exact).abs() <= 1e-9, "({x}, {t}): {u} vs {exact}");
    }
}

#[test]
fn odd_source_under_neumann_robin_is_a_solver_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ex2_config();
    config["F"] = json!([[], [], [], [1]]);
    let path = write_config(dir.path(), &config);
    let out = bin()
        .args(["solve", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path())
        .assert()
        .code(3)
        .get_output()
        .stderr
        .clone();
    let msg = String::from_utf8(out).unwrap();
    assert!(msg.contains("only even powers of x"), "{msg}");
}

#[test]
fn ex1_profile_vanishes() {
    let dir = tempfile::tempdir().unwrap();
    solve_into(&example("ex1.json"), dir.path());
    let report = read_report(&dir.path().join("report.json"));
    let SolutionRecord::Extension(rec) = report.solution else {
        panic!("expected an extension solution")
    };
    assert!(rec.profile.coeffs.iter().all(|&a| a.abs() <= 1e-12), "{:?}", rec.profile.coeffs);
    // poly part t + t²
    for (i, row) in rec.poly_part.iter().enumerate() {
        for (m, &c) in row.iter().enumerate() {
            let expected = if i == 0 && (m == 1 || m == 2) { 1.0 } else { 0.0 };
            assert!((c - expected).abs() <= 1e-12, "x^{i} t^{m}: {c}");
        }
    }
}

#[test]
fn verify_ex2_passes_every_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["verify", "--config"])
        .arg(example("ex2.json"))
        .arg("--out")
        .arg(dir.path())
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let table = String::from_utf8(out).unwrap();
    assert_eq!(table.matches("PASS").count(), 4, "{table}");
    assert!(!table.contains("FAIL"));
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn verify_rejects_zero_transfer() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ex2_config();
    config["nu"] = json!(0);
    let path = write_config(dir.path(), &config);
    let out = bin()
        .args(["verify", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path())
        .assert()
        .code(2)
        .get_output()
        .stderr
        .clone();
    let msg = String::from_utf8(out).unwrap();
    assert!(msg.contains("field `nu` (line"), "{msg}");
}

#[test]
fn verify_ex3_passes_and_itemizes_matrix_differences() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["verify", "--config"])
        .arg(example("ex3.json"))
        .arg("--out")
        .arg(dir.path())
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let table = String::from_utf8(out).unwrap();
    assert!(!table.contains("FAIL"), "{table}");
    assert!(table.contains("diagnostics:"));
    assert!(table.contains("coefficient system (0, 1): generated 2 vs printed 0"), "{table}");
}

#[test]
fn verify_failure_exits_one_and_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ex2_config();
    // two modes cannot resolve the incompatible initial jump
    config["mu0"] = json!([0]);
    config["series"] = json!({ "n_max": 2 });
    let path = write_config(dir.path(), &config);
    bin()
        .args(["verify", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path())
        .assert()
        .code(1);
    assert!(dir.path().join("report.json").exists());
}

fn eigen_rows(args: &[&str]) -> Vec<Vec<f64>> {
    let out = bin().arg("eigen").args(args).assert().success().get_output().stdout.clone();
    String::from_utf8(out)
        .unwrap()
        .lines()
        .skip(1)
        .map(|line| line.split_whitespace().map(|s| s.parse().unwrap()).collect())
        .collect()
}

/// Root of `σ tan σ = 1` on `(0, π/2)` by plain bisection.
fn bisect_nr_first_root() -> f64 {
    let f = |s: f64| s * s.sin() - s.cos();
    let (mut lo, mut hi) = (1e-9, std::f64::consts::FRAC_PI_2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn eigen_table_first_neumann_robin_root() {
    let rows = eigen_rows(&["--kind", "nr", "--k", "1", "--nu", "1", "--l", "1", "-n", "5"]);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][0], 1.0);
    assert!((rows[0][1] - 0.860334).abs() < 1e-6);
    assert!((rows[0][1] - bisect_nr_first_root()).abs() < 1e-12);
    for row in &rows {
        assert!(row[4] <= 1e-12, "{row:?}");
    }
}

#[test]
fn eigen_single_row_is_bracketed() {
    let rows = eigen_rows(&["--kind", "dr", "--k", "0.3", "--nu", "2.5", "--l", "0.7", "-n", "1"]);
    assert_eq!(rows.len(), 1);
    assert!(rows[0][2] < rows[0][1] && rows[0][1] < rows[0][3], "{:?}", rows[0]);
}

#[test]
fn eigen_dirichlet_robin_roots_lie_in_half_odd_brackets() {
    let pi = std::f64::consts::PI;
    let rows = eigen_rows(&["--kind", "dr", "--k", "1", "--nu", "1", "--l", "1", "-n", "3"]);
    for (i, row) in rows.iter().enumerate() {
        let m = (i + 1) as f64;
        assert!((m - 0.5) * pi < row[1] && row[1] < m * pi, "{row:?}");
    }
}

#[test]
fn eigen_rejects_nonpositive_parameters() {
    bin()
        .args(["eigen", "--kind", "nr", "--k", "1", "--nu", "-1", "--l", "1", "-n", "3"])
        .assert()
        .code(2);
    bin()
        .args(["eigen", "--kind", "nr", "--k", "1", "--nu", "1", "--l", "1", "-n", "0"])
        .assert()
        .code(2);
}

#[test]
fn report_reproduces_csv_bit_for_bit() {
    for name in ["ex3.json", "cooling_rod_dr.json", "insulated_nn.json"] {
        let dir = tempfile::tempdir().unwrap();
        solve_into(&example(name), dir.path());
        let written = fs::read_to_string(dir.path().join("solution.csv")).unwrap();
        let report = read_report(&dir.path().join("report.json"));
        assert_eq!(render_csv(&report).unwrap(), written, "{name}");
    }
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    solve_into(&example("ex3.json"), dir.path());
    let single = dir.path().join("single");
    bin()
        .env("HEATROBIN_THREADS", "1")
        .args(["solve", "--config"])
        .arg(example("ex3.json"))
        .arg("--out")
        .arg(&single)
        .assert()
        .success();
    assert_eq!(
        fs::read(dir.path().join("solution.csv")).unwrap(),
        fs::read(single.join("solution.csv")).unwrap()
    );
    bin()
        .env("HEATROBIN_THREADS", "zero")
        .args(["solve", "--config"])
        .arg(example("ex2.json"))
        .arg("--out")
        .arg(dir.path())
        .assert()
        .code(2);
}

#[test]
fn config_errors_name_field_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ex2_config();
    config["grid"] = json!({ "nx": 1 });
    let path = write_config(dir.path(), &config);
    let out = bin()
        .args(["solve", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path())
        .assert()
        .code(2)
        .get_output()
        .stderr
        .clone();
    let msg = String::from_utf8(out).unwrap();
    assert!(msg.contains("field `nx` (line"), "{msg}");

    fs::write(&path, "{ \"k\": 0.25,\n  \"l\": }").unwrap();
    bin()
        .args(["solve", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path())
        .assert()
        .code(2);
}

/// Ways to break an otherwise valid config.
fn corruption() -> impl Strategy<Value = (&'static str, Value)> {
    prop_oneof![
        (-5.0..=0.0f64).prop_map(|v| ("k", json!(v))),
        (-5.0..=0.0f64).prop_map(|v| ("nu", json!(v))),
        (-5.0..=0.0f64).prop_map(|v| ("l", json!(v))),
        (-5.0..=0.0f64).prop_map(|v| ("T", json!(v))),
        (10_001usize..50_000).prop_map(|v| ("grid", json!({ "M": v }))),
        prop_oneof![Just(0usize), 1025usize..5000].prop_map(|v| ("series", json!({ "n_max": v }))),
        (0usize..2).prop_map(|v| ("grid", json!({ "nt": v }))),
        Just(("boundary", json!("robin_robin"))),
        Just(("mu0", json!("1 + x"))),
        Just(("extra", json!(1))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invalid_configs_exit_with_two((key, value) in corruption()) {
        let dir = tempfile::tempdir().unwrap();
        let mut config = ex2_config();
        config[key] = value;
        let path = write_config(dir.path(), &config);
        let output = bin()
            .args(["solve", "--config"])
            .arg(&path)
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap();
        prop_assert_eq!(output.status.code(), Some(2));
        prop_assert!(!dir.path().join("solution.csv").exists());
    }

    #[test]
    fn odd_sources_exit_with_three(power in (0usize..3).prop_map(|p| 2 * p + 1), c in 0.5..3.0f64) {
        let dir = tempfile::tempdir().unwrap();
        let mut config = ex2_config();
        let mut rows = vec![json!([]); power];
        rows.push(json!([c]));
        config["F"] = Value::Array(rows);
        let path = write_config(dir.path(), &config);
        let output = bin()
            .args(["solve", "--config"])
            .arg(&path)
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap();
        prop_assert_eq!(output.status.code(), Some(3));
    }
}
