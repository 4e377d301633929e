//! End-to-end CLI tests: exit codes, file formats, determinism.

use assert_cmd::Command;
use predicates::prelude::*;
use std::fs;
use tempfile::TempDir;

fn cmd() -> Command {
    Command::cargo_bin("orlicz-isotone").unwrap()
}

fn write(dir: &TempDir, name: &str, content: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, content).unwrap();
    path
}

const TWO_ONE_JSON: &str = r#"{"a": 0.0, "b": 2.0, "values": [2.0, 1.0]}"#;

#[test]
fn help_and_version() {
    cmd().arg("--help").assert().success();
    cmd().arg("--version").assert().success();
}

#[test]
fn fit_monotone_csv_exits_zero() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "mono.csv", "x_left,x_right,f\n0.0,1.0,1.0\n1.0,2.0,2.0\n");
    cmd()
        .arg("fit")
        .arg("--input")
        .arg(&input)
        .assert()
        .success()
        .stdout(predicate::str::contains("\"passed\": true"));
}

#[test]
fn fit_two_one_fixture_pools_at_mean() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "p.json", TWO_ONE_JSON);
    let output = dir.path().join("result.json");
    let plot = dir.path().join("plot.csv");
    cmd()
        .arg("fit")
        .arg("--input")
        .arg(&input)
        .arg("--output")
        .arg(&output)
        .arg("--plot")
        .arg(&plot)
        .assert()
        .success();
    let result: serde_json::Value = serde_json::from_str(&fs::read_to_string(&output).unwrap())
        .unwrap();
    assert_eq!(result["blocks"][0]["start"], 0);
    assert_eq!(result["blocks"][0]["end"], 1);
    let level = result["blocks"][0]["level"].as_f64().unwrap();
    assert!((level - 1.5).abs() < 1e-10);
    assert_eq!(result["certificate"]["passed"], true);

    let plot_text = fs::read_to_string(&plot).unwrap();
    assert!(plot_text.starts_with("x,f,g_star\n"));
    assert_eq!(plot_text.lines().count(), 3);
}

#[test]
fn fit_rejects_malformed_csv_with_exit_2() {
    let dir = TempDir::new().unwrap();
    // Non-increasing breakpoints.
    let input = write(&dir, "bad.csv", "x_left,x_right,f\n0.0,0.5,1.0\n0.5,0.4,2.0\n");
    cmd()
        .arg("fit")
        .arg("--input")
        .arg(&input)
        .assert()
        .code(2)
        .stderr(predicate::str::contains("strictly increasing"));
}

#[test]
fn fit_rejects_missing_file_with_exit_2() {
    cmd()
        .arg("fit")
        .arg("--input")
        .arg("/nonexistent/problem.json")
        .assert()
        .code(2);
}

#[test]
fn fit_midpoint_csv_requires_endpoints() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "s.csv", "x,f\n0.25,2.0\n0.75,1.0\n");
    cmd().arg("fit").arg("--input").arg(&input).assert().code(2);
    cmd()
        .arg("fit")
        .arg("--input")
        .arg(&input)
        .arg("--a")
        .arg("0")
        .arg("--b")
        .arg("1")
        .assert()
        .success();
}

#[test]
fn fit_output_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "p.json",
        r#"{"a": 0.0, "b": 1.0, "values": [2.0, -1.0, 0.5, 3.0, 1.0]}"#,
    );
    let out1 = dir.path().join("r1.json");
    let out2 = dir.path().join("r2.json");
    for out in [&out1, &out2] {
        cmd()
            .arg("fit")
            .arg("--input")
            .arg(&input)
            .arg("--spec")
            .arg(r#"{"family":"arctan"}"#)
            .arg("--seed")
            .arg("17")
            .arg("--output")
            .arg(out)
            .assert()
            .success();
    }
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());
}

#[test]
fn certify_accepts_solver_output_and_rejects_perturbation() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "p.json", TWO_ONE_JSON);
    let good = write(&dir, "good.json", "[1.5, 1.5]");
    let bad = write(&dir, "bad.json", r#"{"values": [1.5, 1.6]}"#);
    cmd()
        .arg("certify")
        .arg("--input")
        .arg(&input)
        .arg("--candidate")
        .arg(&good)
        .assert()
        .success()
        .stdout(predicate::str::contains("\"passed\": true"));
    cmd()
        .arg("certify")
        .arg("--input")
        .arg(&input)
        .arg("--candidate")
        .arg(&bad)
        .assert()
        .code(1)
        .stdout(predicate::str::contains("\"passed\": false"));
    // Non-monotone candidate is an input error, not a certificate failure.
    let nonmono = write(&dir, "nm.json", "[2.0, 1.0]");
    cmd()
        .arg("certify")
        .arg("--input")
        .arg(&input)
        .arg("--candidate")
        .arg(&nonmono)
        .assert()
        .code(2);
}

#[test]
fn norm_constant_sqrt2_prints_one() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "c.json",
        &format!(r#"{{"a": 0.0, "b": 1.0, "values": [{}]}}"#, std::f64::consts::SQRT_2),
    );
    let assert = cmd().arg("norm").arg("--input").arg(&input).assert().success();
    let stdout = String::from_utf8(assert.get_output().stdout.clone()).unwrap();
    let norm: f64 = stdout.trim().parse().unwrap();
    assert!((norm - 1.0).abs() < 1e-9, "{norm}");
}

#[test]
fn lux_fit_two_one_fixture() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "p.json", TWO_ONE_JSON);
    let output = dir.path().join("lux.json");
    cmd()
        .arg("lux-fit")
        .arg("--input")
        .arg(&input)
        .arg("--output")
        .arg(&output)
        .assert()
        .success();
    let result: serde_json::Value = serde_json::from_str(&fs::read_to_string(&output).unwrap())
        .unwrap();
    let delta = result["delta"].as_f64().unwrap();
    assert!((delta - 0.5).abs() < 1e-8, "{delta}");
    assert_eq!(result["landers_rogge"]["consistent"], true);
    assert_eq!(result["n_function_hypothesis"], true);
}

#[test]
fn refine_study_fixture_writes_csv() {
    let dir = TempDir::new().unwrap();
    let output = dir.path().join("study.csv");
    cmd()
        .arg("refine-study")
        .arg("--fixture")
        .arg("step")
        .arg("--base-n")
        .arg("16")
        .arg("--refine-levels")
        .arg("2")
        .arg("--output")
        .arg(&output)
        .assert()
        .success();
    let text = fs::read_to_string(&output).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,max_jump,modular,certified"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("16,1,0,true"), "{}", rows[0]);
    assert!(rows[2].starts_with("64,1,0,true"), "{}", rows[2]);
}

#[test]
fn refine_study_inv_sqrt_certifies_every_level() {
    // Unbounded input on a graded mesh, bounded-phi family: every level
    // must certify and the command must exit 0.
    let dir = TempDir::new().unwrap();
    let output = dir.path().join("study.csv");
    cmd()
        .arg("refine-study")
        .arg("--fixture")
        .arg("inv-sqrt")
        .arg("--spec")
        .arg(r#"{"family":"log_shifted"}"#)
        .arg("--base-n")
        .arg("64")
        .arg("--refine-levels")
        .arg("3")
        .arg("--output")
        .arg(&output)
        .assert()
        .success();
    let text = fs::read_to_string(&output).unwrap();
    for row in text.lines().skip(1) {
        assert!(row.ends_with(",true"), "uncertified level: {row}");
    }
}

#[test]
fn refine_study_needs_exactly_one_source() {
    cmd().arg("refine-study").assert().code(2);
    cmd()
        .arg("refine-study")
        .arg("--fixture")
        .arg("unknown")
        .assert()
        .code(2)
        .stderr(predicate::str::contains("unknown fixture"));
}

#[test]
fn power_one_rejected_without_flag_oracled_with_flag() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "p.json", r#"{"a": 0.0, "b": 3.0, "values": [10.0, 0.0, 0.0]}"#);
    cmd()
        .arg("fit")
        .arg("--input")
        .arg(&input)
        .arg("--spec")
        .arg(r#"{"family":"power","p":1.0}"#)
        .assert()
        .code(2)
        .stderr(predicate::str::contains("phi(0+)"));

    let output = dir.path().join("l1.json");
    cmd()
        .arg("fit")
        .arg("--input")
        .arg(&input)
        .arg("--spec")
        .arg(r#"{"family":"power","p":1.0}"#)
        .arg("--allow-l1-oracle")
        .arg("--output")
        .arg(&output)
        .assert()
        .code(1);
    let result: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(result["l1_oracle"], true);
    // The L1 optimum for (10, 0, 0) pooled is the median 0, not the mean.
    assert_eq!(result["g_star"][0].as_f64().unwrap(), 0.0);
}

#[test]
fn demo_runs_with_and_without_l1_contrast() {
    cmd()
        .arg("demo")
        .assert()
        .success()
        .stdout(predicate::str::contains("passed = true"));
    cmd()
        .arg("demo")
        .arg("--allow-l1-oracle")
        .assert()
        .success()
        .stdout(predicate::str::contains("l1 oracle contrast"));
}

#[test]
fn seed_env_fallback_is_honored() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "p.json", TWO_ONE_JSON);
    let out1 = dir.path().join("e1.json");
    let out2 = dir.path().join("e2.json");
    cmd()
        .arg("fit")
        .arg("--input")
        .arg(&input)
        .arg("--output")
        .arg(&out1)
        .env("ORLICZ_ISOTONE_SEED", "99")
        .assert()
        .success();
    cmd()
        .arg("fit")
        .arg("--input")
        .arg(&input)
        .arg("--seed")
        .arg("99")
        .arg("--output")
        .arg(&out2)
        .assert()
        .success();
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());
}
