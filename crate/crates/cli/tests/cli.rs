//! End-to-end tests against the compiled binary: exit codes, output
//! formats, and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const TWO_CLASS: &str = r#"{"sigma2":1,"groups":[
    {"alpha":0.5,"gamma":10,"hbar2":1,"xi2":0,"paths":3},
    {"alpha":0.5,"gamma":10,"hbar2":1,"xi2":0,"paths":3}]}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gsic"))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn solve_prints_both_routes_and_anchored_values() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), TWO_CLASS);
    let out_csv = dir.path().join("powers.csv");
    let out = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--order",
        "0,1",
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("186.388889"), "stdout: {text}");
    assert!(text.contains("18.333333"));
    assert!(text.contains("102.361111"));

    let csv = std::fs::read_to_string(&out_csv).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "# sigma2=1");
    assert_eq!(lines[1], "group,Q,transmit_equivalent");
    let q1: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
    let q2: f64 = lines[3].split(',').nth(1).unwrap().parse().unwrap();
    assert!((q1 - 6710.0 / 36.0).abs() < 1e-9);
    assert!((q2 - 110.0 / 6.0).abs() < 1e-9);
}

#[test]
fn feasibility_exit_codes() {
    let dir = TempDir::new().unwrap();
    let feasible = write_config(dir.path(), TWO_CLASS);
    assert_eq!(
        run(&["feasibility", "--config", feasible.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );

    let overloaded = dir.path().join("over.json");
    std::fs::write(
        &overloaded,
        r#"{"groups":[{"alpha":1.2,"gamma":10,"hbar2":1,"xi2":0,"paths":3}]}"#,
    )
    .unwrap();
    assert_eq!(
        run(&["feasibility", "--config", overloaded.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn missing_field_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"sigma2":1,"groups":[{"alpha":0.5,"hbar2":1,"xi2":0,"paths":3}]}"#,
    );
    let out = run(&["derive", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr_of(&out);
    assert!(err.contains("groups[0]"), "stderr: {err}");
    assert!(err.contains("gamma"), "stderr: {err}");
}

#[test]
fn unknown_key_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"sigma2":1,"extra":1,"groups":[{"alpha":0.5,"gamma":10,"hbar2":1,"xi2":0,"paths":3}]}"#,
    );
    assert_eq!(
        run(&["derive", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn unreachable_target_rejected_at_parse_time() {
    // gamma = 1/nu exactly: the config is structurally valid but the
    // derivation fails, which counts as a validation error.
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"groups":[{"alpha":0.1,"gamma":10,"hbar2":1,"xi2":0.1,"paths":1}]}"#,
    );
    let out = run(&["feasibility", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn pc_sim_random_schedule_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), TWO_CLASS);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let res = run(&[
            "pc-sim",
            "--config",
            cfg.to_str().unwrap(),
            "--schedule",
            "random",
            "--seed",
            "42",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success(), "stderr: {}", stderr_of(&res));
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b);
    let text = String::from_utf8(bytes_a).unwrap();
    assert!(text.starts_with("# sigma2=1\niter,Q_1,Q_2,max_rel_change\n"));
}

#[test]
fn pc_sim_divergence_exits_infeasible() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"groups":[
            {"alpha":0.5,"gamma":10,"hbar2":1,"xi2":0,"paths":3,"epsilon_override":1.0},
            {"alpha":0.5,"gamma":10,"hbar2":1,"xi2":0,"paths":3}]}"#,
    );
    let out = run(&[
        "pc-sim",
        "--config",
        cfg.to_str().unwrap(),
        "--order",
        "0,1",
    ]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_of(&out));
}

#[test]
fn region_traces_the_multicode_line() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), TWO_CLASS);
    let out = run(&[
        "region",
        "--config",
        cfg.to_str().unwrap(),
        "--arch",
        "multicode",
        "--M",
        "4",
        "--sweep",
        "0:0.2:0.1",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha1,alpha2_max");
    // Boundary line alpha2 = 1.1 - 4*alpha1 at the bisection tolerance.
    let val = |line: &str| -> f64 { line.split(',').nth(1).unwrap().parse().unwrap() };
    assert!((val(lines[1]) - 1.1).abs() < 1e-4);
    assert!((val(lines[2]) - 0.7).abs() < 1e-4);
    assert!((val(lines[3]) - 0.3).abs() < 1e-4);
}

#[test]
fn region_requires_two_groups() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"groups":[{"alpha":0.1,"gamma":10,"hbar2":1,"xi2":0,"paths":3}]}"#,
    );
    let out = run(&[
        "region",
        "--config",
        cfg.to_str().unwrap(),
        "--arch",
        "gsic-lmmse",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn order_brute_matches_ascending_errors() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"groups":[
            {"alpha":0.05,"gamma":10,"hbar2":1,"xi2":0,"paths":3,"epsilon_override":0.3},
            {"alpha":0.05,"gamma":10,"hbar2":1,"xi2":0,"paths":3,"epsilon_override":0.1},
            {"alpha":0.05,"gamma":10,"hbar2":1,"xi2":0,"paths":3,"epsilon_override":0.2}]}"#,
    );
    let all_csv = dir.path().join("orders.csv");
    let out = run(&[
        "order",
        "--config",
        cfg.to_str().unwrap(),
        "--mode",
        "brute",
        "--out",
        all_csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("best order: 1,2,0"));
    let csv = std::fs::read_to_string(&all_csv).unwrap();
    assert!(csv.starts_with("order,Q_T\n"));
    assert_eq!(csv.lines().count(), 7); // header + 3! permutations

    let sorted = run(&[
        "order",
        "--config",
        cfg.to_str().unwrap(),
        "--mode",
        "sorted",
    ]);
    assert!(stdout_of(&sorted).contains("ascending-error order: 1,2,0"));
}

#[test]
fn figures_writes_three_deterministic_datasets() {
    let dir = TempDir::new().unwrap();
    let run_figwhere = |sub: &str| {
        let target = dir.path().join(sub);
        let out = bin()
            .args([
                "figures",
                "--out",
                target.to_str().unwrap(),
                "--sweep",
                "0:0.4:0.1",
            ])
            .env("GSIC_THREADS", "1")
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", stderr_of(&out));
        target
    };
    let first = run_figwhere("a");
    let second = run_figwhere("b");
    for name in [
        "fig1_gsic_lmmse_vs_mf.csv",
        "fig2_gsicmf_vs_allmf.csv",
        "fig3_gsic_vs_multicode.csv",
    ] {
        let a = std::fs::read(first.join(name)).unwrap();
        let b = std::fs::read(second.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("arch,xi2,alpha1,alpha2_max\n"));
        // Three xi2 settings for each of the two compared architectures.
        assert_eq!(text.lines().count(), 1 + 2 * 3 * 5);
    }
}

#[test]
fn bad_threads_env_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), TWO_CLASS);
    let out = bin()
        .args(["derive", "--config", cfg.to_str().unwrap()])
        .env("GSIC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
