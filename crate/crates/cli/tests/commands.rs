use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.json")).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entropyforge")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn stderr_of_failure(args: &[&str]) -> String {
    let out = run(args);
    assert!(!out.status.success(), "{args:?} should fail");
    String::from_utf8(out.stderr).unwrap()
}

/// Header and rows of a CSV on stdout, metadata dropped.
fn rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    (header, lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

#[test]
fn every_shipped_config_validates() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path: PathBuf = entry.unwrap().path();
        let out = stdout(&["validate", "--config", path.to_str().unwrap()]);
        assert!(out.starts_with("ok: "), "{out}");
        count += 1;
    }
    assert!(count >= 5);
}

#[test]
fn config_errors_point_at_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"valency\": {\"pattern\": [2]},\n  \"hModle\": \"diagonal-full\"\n}\n").unwrap();
    let err = stderr_of_failure(&["validate", "--config", bad.to_str().unwrap()]);
    assert!(err.contains(":3:"), "{err}");
    assert!(err.contains("hModle") && err.contains('^'), "{err}");
}

#[test]
fn budget_errors_name_the_length() {
    let err = stderr_of_failure(&["exact", "--config", &config("binary"), "--n", "0..6", "--budget-keys", "50"]);
    assert!(err.contains("key budget of 50 exceeded at n = 3"), "{err}");
    let err = stderr_of_failure(&[
        "wordtest", "--config", &config("binary"), "--n", "64", "--samples", "2", "--budget-states", "5",
    ]);
    assert!(err.contains("at n = 64"), "{err}");
    stderr_of_failure(&["simulate", "--config", &config("binary"), "--n", "8", "--budget-states", "0"]);
}

#[test]
fn exact_probabilities_are_rationals() {
    let (header, rows) = rows(&stdout(&["exact", "--config", &config("dinfty_f2"), "--n", "1,2"]));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    assert_eq!(rows.len(), 2);
    // one step: the lamp is off with probability 1/2
    assert_eq!(rows[0][col("phi_trivial_exact")], "1/2");
    let (num, den) = rows[1][col("return_prob_exact")].split_once('/').unwrap();
    let value: f64 = rows[1][col("return_prob")].parse().unwrap();
    assert!((num.parse::<f64>().unwrap() / den.parse::<f64>().unwrap() - value).abs() < 1e-15);
}

#[test]
fn design_rows_follow_plateaus() {
    let out = stdout(&["design", "--alpha", "0.6", "--beta", "0.6", "--n-max", "1e6"]);
    assert!(out.contains("# valency prefix 16 2"), "{out}");
    let (header, rows) = rows(&out);
    assert_eq!(header, ["n", "k", "beta_n"]);
    let ns: Vec<u128> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(ns.windows(2).all(|w| w[0] < w[1]));
    assert!(*ns.last().unwrap() <= 1_000_000);
    let err = stderr_of_failure(&["design", "--alpha", "0.4", "--beta", "0.6"]);
    assert!(err.contains("inadmissible"), "{err}");
}

#[test]
fn wordtest_decides_relations() {
    let out = stdout(&["wordtest", "--config", &config("dinfty_f2"), "--word", "s1 s1", "--word", "k(1,0) k(1,0) s1"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let words = v["words"].as_array().unwrap();
    assert_eq!(words[0]["trivial"], true);
    assert_eq!(words[1]["trivial"], false);
    stderr_of_failure(&["wordtest", "--config", &config("dinfty_f2"), "--word", "s2"]);
}

#[test]
fn report_recovers_a_known_slope() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("power.csv");
    let body: String = (1..=8).map(|i| 1u64 << i).map(|n| format!("{n},{}\n", (n as f64).powf(0.75) * 3.0)).collect();
    std::fs::write(&csv, format!("# synthetic\nn,y\n{body}")).unwrap();
    let (header, rows) = rows(&stdout(&["report", csv.to_str().unwrap(), "--y", "y"]));
    let slope: f64 = rows[0][header.iter().position(|h| h == "slope").unwrap()].parse().unwrap();
    assert!((slope - 0.75).abs() < 1e-12, "{slope}");
    assert_eq!(rows[0][0], "power.csv");
}

#[test]
fn lamplighter_rejects_trivial_lamps() {
    stderr_of_failure(&["lamplighter", "--n", "4", "--f-order", "1"]);
}

#[test]
fn delta_sim_reports_regimes() {
    let (header, rows) = rows(&stdout(&[
        "delta-sim", "--config", &config("dinfty_f2"), "--radii", "2,64", "--n", "2,300", "--samples", "64",
    ]));
    let col = header.iter().position(|h| h == "regime").unwrap();
    assert_ne!(rows[0][col], rows[1][col]);
}
