use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn qdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdiv")).args(args).output().expect("spawn qdiv")
}

fn qdiv_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdiv")).args(args).env(key, value).output().expect("spawn qdiv")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stdout_csv(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone()).unwrap().lines().map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn tmp(name: &str, content: &Value) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, serde_json::to_string_pretty(content).unwrap()).unwrap();
    path
}

fn mat(rows: &[[f64; 2]; 2]) -> Value {
    json!({"n": 2, "re": rows})
}

fn example_points() -> Value {
    let x = [
        [[2.0, 1.0], [1.0, 1.0]],
        [[9.0, 2.0], [2.0, 1.0]],
        [[2.0, 1.0], [1.0, 7.0]],
        [[8.0, 5.0], [5.0, 8.0]],
        [[8.0, 8.0], [8.0, 9.0]],
    ];
    json!({"matrices": x.iter().map(mat).collect::<Vec<_>>()})
}

#[test]
fn divergence_of_identical_matrices_is_zero() {
    let p = tmp("same.json", &json!([mat(&[[2.0, 1.0], [1.0, 3.0]]), mat(&[[2.0, 1.0], [1.0, 3.0]])]));
    let out = qdiv(&["div", p.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["squared"], json!([[0.0, 0.0], [0.0, 0.0]]));
    assert_eq!(v["mode"], "sdiv");
}

#[test]
fn qjsd_table_on_example_points() {
    let p = tmp("example.json", &example_points());
    let out = qdiv(&["div", p.to_str().unwrap(), "--mode", "qjsd"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let table = v["squared"].as_array().unwrap();
    assert_eq!(table.len(), 5);
    let j12 = table[0][1].as_f64().unwrap();
    assert!((j12 - 0.631_726_223_447_238_6).abs() < 1e-13);
    assert_eq!(table[0][1], table[1][0]);
    // byte-identical on a second run
    assert_eq!(out.stdout, qdiv(&["div", p.to_str().unwrap(), "--mode", "qjsd"]).stdout);
}

#[test]
fn scalar_inputs_give_scalar_distance() {
    let p = tmp("scalars.json", &json!([{"n": 1, "re": [[2.0]]}, {"n": 1, "re": [[8.0]]}]));
    let out = qdiv(&["div", p.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let rows = stdout_csv(&out);
    assert_eq!(rows[0], ["i", "j", "squared", "root"]);
    let row = rows.iter().find(|r| r[0] == "0" && r[1] == "1").unwrap();
    // ln(5/4)
    assert!((row[2].parse::<f64>().unwrap() - 0.223_143_551_314_209_76).abs() < 1e-15);
}

#[test]
fn jensen_mode_uses_registry_generators() {
    let p = tmp("example_jensen.json", &example_points());
    assert_eq!(code(&qdiv(&["div", p.to_str().unwrap(), "--mode", "jensen:k1"])), 0);
    assert_eq!(code(&qdiv(&["div", p.to_str().unwrap(), "--mode", "jensen:nope"])), 2);
    assert_eq!(code(&qdiv(&["div", p.to_str().unwrap(), "--mode", "bogus"])), 2);
}

#[test]
fn divergence_error_codes() {
    let garbage = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("garbage.json");
    std::fs::write(&garbage, "{not json").unwrap();
    assert_eq!(code(&qdiv(&["div", garbage.to_str().unwrap()])), 2);
    let ragged = tmp("ragged.json", &json!([{"n": 2, "re": [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]}]));
    assert_eq!(code(&qdiv(&["div", ragged.to_str().unwrap()])), 2);
    // indefinite input is well-formed but outside the domain
    let indefinite = tmp("indef.json", &json!([mat(&[[1.0, 2.0], [2.0, 1.0]]), mat(&[[1.0, 0.0], [0.0, 1.0]])]));
    assert_eq!(code(&qdiv(&["div", indefinite.to_str().unwrap()])), 3);
    assert_eq!(code(&qdiv(&["div", "/nonexistent/matrices.json"])), 2);
}

#[test]
fn verify_requires_a_seed() {
    assert_eq!(code(&qdiv(&["verify", "metric"])), 2);
    assert_eq!(code(&qdiv(&["verify", "nonsense", "--seed", "1"])), 2);
}

#[test]
fn verify_metric_seed_42_passes() {
    let out = qdiv(&["verify", "metric", "--seed", "42", "--trials", "200"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["violations"], 0);
}

#[test]
fn verify_csv_lists_checks() {
    let out = qdiv(&["verify", "integral", "--seed", "3", "--trials", "2", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let rows = stdout_csv(&out);
    assert_eq!(rows[0], ["check", "count", "failures", "worst", "tolerance"]);
    let names: Vec<&str> = rows[1..].iter().map(|r| r[0].as_str()).collect();
    assert_eq!(names, ["qjsd_integral", "shift_derivative", "scalar_quadrature"]);
}

#[test]
fn corrupted_kernel_is_a_validation_error() {
    let k = tmp("bad_kernel.json", &json!({"K": [[1.0, 2.0], [2.0, 0.0]]}));
    let out = qdiv(&["verify", "schoenberg", "--seed", "1", "--trials", "2", "--kernel", k.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn user_kernel_verdict_is_reported() {
    let k = tmp("line_kernel.json", &json!({"K": [[0.0, 1.0, 4.0], [1.0, 0.0, 1.0], [4.0, 1.0, 0.0]]}));
    let out = qdiv(&["verify", "schoenberg", "--seed", "1", "--trials", "2", "--kernel", k.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["kernel"]["verdict"], "cnd", "{}", v["kernel"]);
    assert_eq!(v["kernel"]["schoenberg"].as_array().unwrap().len(), 20);
}

#[test]
fn violations_write_replays_that_reproduce_without_the_rng() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("replays");
    let _ = std::fs::remove_dir_all(&dir);
    let out = qdiv(&[
        "verify",
        "rearrange",
        "--seed",
        "5",
        "--trials",
        "4",
        "--tol-bound=-1",
        "--replay-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert!(v["violations"].as_u64().unwrap() > 0);
    let files: Vec<PathBuf> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(!files.is_empty());
    for f in &files {
        let f = f.to_str().unwrap();
        assert_eq!(code(&qdiv(&["replay", f, "--tol-bound=-1"])), 1, "{f}");
        assert_eq!(code(&qdiv(&["replay", f])), 0, "{f}");
    }
}

#[test]
fn certify_s2_and_s3() {
    for (target, floor) in [("s2", 9.8), ("s3", 0.16)] {
        let out = qdiv(&["certify", target]);
        assert_eq!(code(&out), 0);
        let v = stdout_json(&out);
        assert_eq!(v["verdict"], "ProvedPositive");
        let lo = v["lo"].as_str().unwrap();
        assert!(lo.starts_with("0x"), "{lo}");
        let lo = qdiv::certify::parse_hexfloat(lo).unwrap();
        assert!(lo > floor);
    }
}

#[test]
fn identical_points_file_is_inconclusive() {
    let p = tmp(
        "identical.json",
        &json!({"tau_denominator": 2, "coeffs": [1, -1], "points": [{"a": 2, "b": 1, "d": 1}, {"a": 2, "b": 1, "d": 1}]}),
    );
    let out = qdiv(&["certify", p.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    assert_eq!(stdout_json(&out)["verdict"], "Inconclusive");
}

#[test]
fn certify_file_errors() {
    let sum = tmp(
        "bad_sum.json",
        &json!({"tau_denominator": 2, "coeffs": [1, 1], "points": [{"a": 2, "b": 1, "d": 1}, {"a": 3, "b": 0, "d": 1}]}),
    );
    assert_eq!(code(&qdiv(&["certify", sum.to_str().unwrap()])), 2);
    let indefinite = tmp(
        "indef_points.json",
        &json!({"tau_denominator": 2, "coeffs": [1, -1], "points": [{"a": 1, "b": 2, "d": 1}, {"a": 3, "b": 0, "d": 1}]}),
    );
    assert_eq!(code(&qdiv(&["certify", indefinite.to_str().unwrap()])), 3);
}

#[test]
fn certificates_recheck_and_detect_tampering() {
    let out = qdiv(&["certify", "s3"]);
    let cert = stdout_json(&out);
    let p = tmp("s3_cert.json", &cert);
    let again = qdiv(&["certify", p.to_str().unwrap(), "--recheck"]);
    assert_eq!(code(&again), 0);
    assert_eq!(again.stdout, out.stdout);

    let mut tampered = cert.clone();
    tampered["inputs"]["coeffs"][0] = json!(-11);
    let t = tmp("s3_tampered.json", &tampered);
    assert_eq!(code(&qdiv(&["certify", t.to_str().unwrap(), "--recheck"])), 2);
}

#[test]
fn certificates_do_not_depend_on_thread_count() {
    let one = qdiv_env(&["certify", "s2"], "QDIV_THREADS", "1");
    let four = qdiv_env(&["certify", "s2"], "QDIV_THREADS", "4");
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(code(&qdiv_env(&["certify", "s2"], "QDIV_THREADS", "lots")), 2);
}

#[test]
fn plot_shifted_distance_of_equal_points_is_zero() {
    let p = tmp("pair_same.json", &json!([mat(&[[2.0, 1.0], [1.0, 3.0]]), mat(&[[2.0, 1.0], [1.0, 3.0]])]));
    let out = qdiv(&["plotdata", "shifted_distance", "--input", p.to_str().unwrap(), "--points", "7"]);
    assert_eq!(code(&out), 0);
    let rows = stdout_csv(&out);
    assert_eq!(rows.len(), 8);
    assert!(rows[1..].iter().all(|r| r[1].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn plot_qjsd_tail_decreases() {
    let out = qdiv(&["plotdata", "qjsd_tail", "--points", "30"]);
    assert_eq!(code(&out), 0);
    let rows = stdout_csv(&out);
    assert_eq!(rows[0], ["t", "qjsd_shifted"]);
    let t: Vec<f64> = rows[1..].iter().map(|r| r[0].parse().unwrap()).collect();
    let j: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!((t[0], *t.last().unwrap()), (1.0, 1e4));
    assert!(j.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn plot_schoenberg_sweep_goes_negative() {
    let out = qdiv(&["plotdata", "schoenberg_sweep"]);
    assert_eq!(code(&out), 0);
    let rows = stdout_csv(&out);
    assert_eq!(rows[0], ["beta", "min_eig"]);
    assert!(rows[1..].iter().any(|r| r[1].parse::<f64>().unwrap() < 0.0));
    assert_eq!(out.stdout, qdiv(&["plotdata", "schoenberg_sweep"]).stdout);
}

#[test]
fn plot_rejects_bad_ranges() {
    assert_eq!(code(&qdiv(&["plotdata", "qjsd_tail", "--t-min", "5", "--t-max", "1"])), 2);
    assert_eq!(code(&qdiv(&["plotdata", "shifted_distance", "--t-min", "-1"])), 2);
}
