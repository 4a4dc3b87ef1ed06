//! Exit-code and file-format contract of the `opfactor` binary, exercised
//! through real subprocesses.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opfactor"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary spawns")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn gen_pair(dir: &Path, kind: &str, n: usize, seed: u64) -> (String, String) {
    let t = dir.join(format!("{kind}-{seed}-t.csv"));
    let b = dir.join(format!("{kind}-{seed}-b.csv"));
    let out = run(&[
        "gen",
        "--kind",
        kind,
        "--n",
        &n.to_string(),
        "--seed",
        &seed.to_string(),
        "--out-t",
        t.to_str().unwrap(),
        "--out-b",
        b.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "gen failed: {}", String::from_utf8_lossy(&out.stderr));
    (
        t.to_str().unwrap().to_string(),
        b.to_str().unwrap().to_string(),
    )
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["check", "--help"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    // No subcommand.
    assert_eq!(code(&run(&[])), 1);
    // Unknown subcommand and unknown flag.
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["suite", "--frobnicate"])), 1);
    // Missing required flags.
    assert_eq!(code(&run(&["check", "--mode", "sebestyen"])), 1);
    // Invalid enum value.
    let dir = tempfile::tempdir().unwrap();
    let (t, b) = gen_pair(dir.path(), "random", 3, 1);
    let cert = dir.path().join("c.json");
    let out = run(&[
        "check", "--mode", "nonsense", "--t", &t, "--b", &b, "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn missing_input_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let out = run(&[
        "check",
        "--mode",
        "sebestyen",
        "--t",
        "/nonexistent/t.csv",
        "--b",
        "/nonexistent/b.csv",
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(!cert.exists());
}

#[test]
fn feasible_check_and_verify_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (t, b) = gen_pair(dir.path(), "forward-feasible", 4, 11);
    let cert = dir.path().join("cert.json");
    let out = run(&[
        "check", "--mode", "sebestyen", "--t", &t, "--b", &b, "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("feasible"));

    let out = run(&["verify", cert.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("all checks passed"));
}

#[test]
fn infeasible_check_exits_two_and_writes_witness() {
    let dir = tempfile::tempdir().unwrap();
    // The difference operator against the identity is forward-infeasible:
    // the pairing B*T is not Hermitian.
    let (t, b) = gen_pair(dir.path(), "difference-operator", 4, 0);
    let cert = dir.path().join("cert.json");
    let out = run(&[
        "check", "--mode", "sebestyen", "--t", &t, "--b", &b, "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let text = std::fs::read_to_string(&cert).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["verdict"], "infeasible");
    assert!(v["witness"].as_array().is_some_and(|w| !w.is_empty()));

    // The infeasibility claim itself re-verifies.
    let out = run(&["verify", cert.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn douglas_rank_jump_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.csv");
    let b = dir.path().join("b.csv");
    std::fs::write(&t, "1,0\n0,1\n").unwrap();
    std::fs::write(&b, "1,0\n0,0\n").unwrap();
    let cert = dir.path().join("cert.json");
    let out = run(&[
        "check",
        "--mode",
        "douglas",
        "--t",
        t.to_str().unwrap(),
        "--b",
        b.to_str().unwrap(),
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn tampered_certificate_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let (t, b) = gen_pair(dir.path(), "douglas-feasible", 4, 21);
    let cert = dir.path().join("cert.json");
    assert_eq!(
        code(&run(&[
            "check", "--mode", "douglas", "--t", &t, "--b", &b, "--out",
            cert.to_str().unwrap(),
        ])),
        0
    );
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let entry = &mut v["b_matrix"]["data"][0][0];
    *entry = serde_json::json!(entry.as_f64().unwrap() + 1e-2);
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(code(&run(&["verify", tampered.to_str().unwrap()])), 3);
}

#[test]
fn malformed_certificates_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(code(&run(&["verify", empty.to_str().unwrap()])), 1);

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{\"schema_version\": 42}").unwrap();
    assert_eq!(code(&run(&["verify", garbage.to_str().unwrap()])), 1);

    assert_eq!(code(&run(&["verify", "/nonexistent/cert.json"])), 1);
}

#[test]
fn gen_is_deterministic_and_supports_json() {
    let dir = tempfile::tempdir().unwrap();
    let (t1, _) = gen_pair(dir.path(), "random", 5, 77);
    let t2 = dir.path().join("again-t.json");
    let b2 = dir.path().join("again-b.csv");
    let out = run(&[
        "gen",
        "--kind",
        "random",
        "--n",
        "5",
        "--seed",
        "77",
        "--out-t",
        t2.to_str().unwrap(),
        "--out-b",
        b2.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    // Same seed, different container format: the parsed matrices agree
    // bit for bit.
    let csv = opfactor::io::read_matrix_file(Path::new(&t1)).unwrap();
    let json = opfactor::io::read_matrix_file(&t2).unwrap();
    assert_eq!(csv, json);
}

#[test]
fn check_accepts_json_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    let b = dir.path().join("b.json");
    let out = run(&[
        "gen", "--kind", "forward-feasible", "--n", "3", "--seed", "5",
        "--out-t", t.to_str().unwrap(), "--out-b", b.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let cert = dir.path().join("cert.json");
    let out = run(&[
        "check",
        "--mode",
        "sebestyen",
        "--t",
        t.to_str().unwrap(),
        "--b",
        b.to_str().unwrap(),
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn invalid_gen_spec_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.csv");
    let b = dir.path().join("b.csv");
    let out = run(&[
        "gen", "--kind", "random", "--n", "0", "--out-t",
        t.to_str().unwrap(), "--out-b", b.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    let out = run(&[
        "gen", "--kind", "random", "--n", "2", "--scale", "-1", "--out-t",
        t.to_str().unwrap(), "--out-b", b.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn suite_small_run_exits_zero() {
    let out = run(&["suite", "--seed", "7", "--count", "6"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS"));
    assert!(text.contains("four-way-equivalence"));
}

#[test]
fn scale_prints_csv_and_respects_out_flag() {
    let out = run(&["scale", "--n-list", "4,8"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("n,lambda_min,factor_norm,m_max"));
    assert_eq!(text.lines().count(), 3);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scale.csv");
    let out = run(&["scale", "--n-list", "4,8", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, text);

    // Non-ascending list and unsupported kind are usage errors.
    assert_eq!(code(&run(&["scale", "--n-list", "8,4"])), 1);
    assert_eq!(code(&run(&["scale", "--n-list", "4,8", "--kind", "random"])), 1);
}

#[test]
fn tol_env_var_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let (t, b) = gen_pair(dir.path(), "forward-feasible", 3, 31);
    let cert = dir.path().join("cert.json");

    // An out-of-range env tolerance is rejected by Tolerance validation.
    let out = bin()
        .env("OPFACTOR_TOL", "1.5")
        .args(["check", "--mode", "sebestyen", "--t", &t, "--b", &b, "--out", cert.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);

    // Garbage env value is a parse error.
    let out = bin()
        .env("OPFACTOR_TOL", "not-a-number")
        .args(["check", "--mode", "sebestyen", "--t", &t, "--b", &b, "--out", cert.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);

    // The --tol flag wins over a broken environment value.
    let out = bin()
        .env("OPFACTOR_TOL", "not-a-number")
        .args([
            "check", "--mode", "sebestyen", "--t", &t, "--b", &b, "--tol", "1e-9",
            "--out", cert.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);

    // A sane env value is accepted.
    let out = bin()
        .env("OPFACTOR_TOL", "1e-8")
        .args(["check", "--mode", "sebestyen", "--t", &t, "--b", &b, "--out", cert.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(v["tolerance"]["residual_rel"].as_f64(), Some(1e-8));
}
