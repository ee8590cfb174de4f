//! End-to-end tests of the drsolve binary: file formats, determinism,
//! exit codes, and agreement between solver paths.

use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn drsolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drsolve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn drsolve_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drsolve"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn gen_to(path: &Path, seed: u64) {
    let out = drsolve(&["gen", "--n", "3", "--seed", &seed.to_string(), "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
}

#[test]
fn gen_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let c = dir.path().join("c.json");
    gen_to(&a, 11);
    gen_to(&b, 11);
    gen_to(&c, 12);
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap());
    assert_ne!(bytes_a, std::fs::read(&c).unwrap());
    // stdout emission matches the file body.
    let out = drsolve(&["gen", "--n", "3", "--seed", "11"]);
    assert_eq!(out.stdout, bytes_a);
}

#[test]
fn instance_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    for kind in ["quad", "table"] {
        let out = drsolve(&["gen", "--n", "4", "--seed", "3", "--kind", kind, "--output", path.to_str().unwrap()]);
        assert!(out.status.success());
        let text = std::fs::read_to_string(&path).unwrap();
        let value: Value = serde_json::from_str(&text).unwrap();
        for key in ["n", "D", "B", "gamma", "ell", "u", "dbar", "bbar", "costs"] {
            assert!(value.get(key).is_some(), "{kind}: missing key {key}");
        }
        let expected_kind = if kind == "quad" { "quad_uvw" } else { "table" };
        assert_eq!(value["costs"][0]["kind"], expected_kind);
        // Parse → re-serialize is the identity on the JSON value.
        let solved = drsolve(&["solve", "--input", path.to_str().unwrap(), "--algo", "greedy"]);
        assert!(solved.status.success(), "{kind}: solve failed");
    }
}

#[test]
fn solution_file_shape() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    gen_to(&inst, 21);
    let plain = stdout_json(&drsolve(&["solve", "--input", inst.to_str().unwrap()]));
    for key in ["d", "b", "objective", "iterations", "distance", "algorithm"] {
        assert!(plain.get(key).is_some(), "missing key {key}");
    }
    assert_eq!(plain["algorithm"], "greedy");
    assert!(plain.get("trace").is_none(), "trace must be opt-in");

    let traced = stdout_json(&drsolve(&["solve", "--input", inst.to_str().unwrap(), "--trace"]));
    let trace = traced["trace"].as_array().expect("trace rows");
    assert_eq!(trace[0]["k"], 0);
    assert_eq!(trace[0]["distance"], 0);

    let to_file = dir.path().join("sol.json");
    let out = drsolve(&["solve", "--input", inst.to_str().unwrap(), "--output", to_file.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&to_file).unwrap()).unwrap();
    assert_eq!(written["objective"], plain["objective"]);
}

#[test]
fn solver_paths_agree() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    for seed in [0u64, 1, 2, 3, 4] {
        gen_to(&inst, seed);
        let objective = |algo: &str| -> i64 {
            stdout_json(&drsolve(&["solve", "--input", inst.to_str().unwrap(), "--algo", algo]))["objective"]
                .as_i64()
                .unwrap()
        };
        let brute = objective("brute");
        assert_eq!(objective("greedy"), brute, "seed {seed}");
        assert_eq!(objective("greedy-slow"), brute, "seed {seed}");
        assert_eq!(objective("poly"), brute, "seed {seed}");
        // The relaxation solvers agree with each other and can only
        // undercut the allowance-constrained optimum.
        let da = objective("da");
        assert_eq!(objective("da-scaling"), da, "seed {seed}");
        assert!(da <= brute, "seed {seed}");
    }
}

#[test]
fn invalid_instance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");

    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(code(&drsolve(&["solve", "--input", path.to_str().unwrap()])), 1);

    // Structurally broken: negative allowance.
    let bad = serde_json::json!({
        "n": 2, "D": 2, "B": 2, "gamma": -1,
        "ell": [0, 0], "u": [4, 4], "dbar": [1, 1], "bbar": [1, 1],
        "costs": [
            {"kind": "quad_uvw", "u": [1, 0], "v": [1, 0], "w": [0, 0]},
            {"kind": "quad_uvw", "u": [1, 0], "v": [1, 0], "w": [0, 0]}
        ]
    });
    std::fs::write(&path, serde_json::to_string(&bad).unwrap()).unwrap();
    assert_eq!(code(&drsolve(&["solve", "--input", path.to_str().unwrap()])), 1);

    assert_eq!(code(&drsolve(&["solve", "--input", dir.path().join("missing.json").to_str().unwrap()])), 1);
}

#[test]
fn infeasible_instance_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tight.json");
    // Well-formed costs and bounds, but the standing allocation parks
    // three bikes against a budget of one.
    let bad = serde_json::json!({
        "n": 2, "D": 3, "B": 1, "gamma": 1,
        "ell": [0, 0], "u": [4, 4], "dbar": [1, 0], "bbar": [1, 2],
        "costs": [
            {"kind": "quad_uvw", "u": [1, 0], "v": [1, 0], "w": [0, 0]},
            {"kind": "quad_uvw", "u": [1, 0], "v": [1, 0], "w": [0, 0]}
        ]
    });
    std::fs::write(&path, serde_json::to_string(&bad).unwrap()).unwrap();
    let out = drsolve(&["solve", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bike-budget"));
    // check honors the same contract.
    assert_eq!(code(&drsolve(&["check", "--input", path.to_str().unwrap()])), 2);
}

#[test]
fn check_random_corpus_passes() {
    let out = drsolve(&["check", "--random", "4", "--seed", "9"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().last().unwrap();
    let summary: Value = serde_json::from_str(last).expect("summary line is JSON");
    assert_eq!(summary["instances"], 4);
    assert_eq!(summary["failed"], 0);
    assert_eq!(summary["checks"], 4 * 9);
    assert!(text.lines().filter(|l| l.contains(": PASS")).count() == 36);
}

#[test]
fn check_subset_and_unknown_suite() {
    let out = drsolve(&["check", "--random", "2", "--seed", "1", "--suite", "m-exc,mu-convex"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let summary: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(summary["checks"], 4);

    let bad = drsolve(&["check", "--random", "1", "--suite", "nope"]);
    assert_eq!(code(&bad), 1);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unknown check"));
}

#[test]
fn enum_guard_env_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    gen_to(&inst, 2);
    let out = drsolve_env(
        &["solve", "--input", inst.to_str().unwrap(), "--algo", "brute"],
        "DRSOLVE_ENUM_GUARD",
        "3",
    );
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("enumeration budget"));

    let bad = drsolve_env(
        &["solve", "--input", inst.to_str().unwrap(), "--algo", "brute"],
        "DRSOLVE_ENUM_GUARD",
        "lots",
    );
    assert_eq!(code(&bad), 1);
}

#[test]
fn bench_writes_and_appends_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    for seed in ["1", "2"] {
        let out = drsolve(&[
            "bench", "--family", "scaling", "--n", "8", "--capacity", "5000",
            "--seed", seed, "--csv", csv.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = drsolve(&[
        "bench", "--family", "greedy", "--n", "6", "--capacity", "60",
        "--seed", "3", "--csv", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family,n,capacity,seed,phases,total_steps,steps_per_phase,wall_ms");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("scaling,8,5000,1,"));
    assert!(lines[3].starts_with("greedy,6,60,3,"));
}
