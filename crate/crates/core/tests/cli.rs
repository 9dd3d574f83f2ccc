use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lp-recovery"))
        .args(args)
        .current_dir(dir)
        .env("LP_RECOVERY_THREADS", "2")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn limit_thresholds_print_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["threshold", "strong-limit", "--p", "1", "--output", "t.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 0.239).abs() <= 0.001);
    let record: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    assert!((record["z_star"].as_f64().unwrap() - (2.0 * 2f64.ln()).sqrt()).abs() < 1e-9);
    assert!(String::from_utf8_lossy(&o.stderr).contains("config: "));

    let o = run(&["threshold", "weak-limit", "--p", "0.3"], dir.path());
    assert_eq!(stdout(&o).trim(), "0.666667");
    let o = run(&["threshold", "weak-limit", "--p", "1"], dir.path());
    assert_eq!(stdout(&o).trim(), "1.000000");
    let o = run(&["threshold", "sectional-limit", "--p", "0", "--format", "csv", "--output", "s.csv"], dir.path());
    assert_eq!(stdout(&o).trim(), "0.500000");
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(csv, "quantity,p,alpha,value\nsectional_limit,0.0,,0.5\n");
}

#[test]
fn certify_sectional_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("sectional.csv"), "16\n16\n1\n36\n").unwrap();
    let args = [
        "certify", "--matrix", "sectional.csv", "--mode", "sectional", "--p", "0.5", "--support", "1,2",
    ];
    let o = run(&args, dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["holds"], false);
    assert_eq!(v["certificate_exact"], true);
    assert_eq!(v["witness"]["lhs"], 8.0);
    assert_eq!(v["witness"]["rhs"], 7.0);
    assert_eq!(v["witness"]["support"], serde_json::json!([1, 2]));

    let mut p1 = args.to_vec();
    p1[6] = "1";
    let v: serde_json::Value = serde_json::from_str(&stdout(&run(&p1, dir.path()))).unwrap();
    assert_eq!(v["holds"], true);
}

#[test]
fn certify_with_pattern_file_and_witness_csv() {
    let dir = tempfile::tempdir().unwrap();
    let k = 3;
    let beta: Vec<String> = (0..6 * k)
        .map(|i| if i < k { "1" } else if i < 2 * k { "-1" } else { "0.015625" }.to_string())
        .collect();
    std::fs::write(dir.path().join("beta.csv"), beta.join("\n")).unwrap();
    std::fs::write(dir.path().join("pat.json"), r#"{"support": [1, 2, 3, 4, 5, 6]}"#).unwrap();
    let o = run(
        &["certify", "--matrix", "beta.csv", "--mode", "weak_lp", "--p", "0.5", "--pattern", "pat.json", "--witness-csv", "z.csv"],
        dir.path(),
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["holds"], false);
    assert_eq!(v["witness"]["t_minus"], serde_json::json!([4, 5, 6]));
    assert_eq!(std::fs::read_to_string(dir.path().join("z.csv")).unwrap().trim(), "1.0");
    let o = run(&["certify", "--matrix", "beta.csv", "--mode", "strong", "--p", "0.5", "--sparsity", "3"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["holds"], true);
}

#[test]
fn solve_from_job_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.csv"), "1,0,2,1\n0,1,1,-1\n").unwrap();
    std::fs::write(dir.path().join("x.csv"), "0\n0\n3\n0\n").unwrap();
    std::fs::write(dir.path().join("job.json"), r#"{"matrix": "a.csv", "x_true": "x.csv", "p": 0.5}"#).unwrap();
    for method in ["l0", "l1", "lp"] {
        let o = run(&["solve", "--instance", "job.json", "--method", method], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["recovered"], true, "{method}: {v}");
    }
    let o = run(&["solve", "--instance", "job.json", "--method", "l1", "--format", "csv"], dir.path());
    assert!(stdout(&o).starts_with("index,x_hat\n1,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["threshold", "strong-limit"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["threshold", "strong-limit", "--p", "1", "--bogus"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));

    std::fs::write(dir.path().join("bad.csv"), "1,2\n3,oops\n").unwrap();
    let o = run(&["certify", "--matrix", "bad.csv", "--mode", "strong", "--sparsity", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2, field 2"));

    // Rank-deficient measurement matrix: a numerical failure.
    std::fs::write(dir.path().join("a.csv"), "1,1,0\n2,2,0\n").unwrap();
    std::fs::write(dir.path().join("y.csv"), "1\n2\n").unwrap();
    std::fs::write(dir.path().join("job.json"), r#"{"matrix": "a.csv", "y": "y.csv", "p": 0.5}"#).unwrap();
    let o = run(&["solve", "--instance", "job.json", "--method", "lp"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));

    let bad_threads = Command::new(env!("CARGO_BIN_EXE_lp-recovery"))
        .args(["threshold", "weak-limit", "--p", "0.5"])
        .env("LP_RECOVERY_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(1));
}

#[test]
fn every_subcommand_has_help() {
    let dir = tempfile::tempdir().unwrap();
    let paths: &[&[&str]] = &[
        &[],
        &["threshold"],
        &["threshold", "strong-limit"],
        &["threshold", "weak-limit"],
        &["threshold", "sectional-limit"],
        &["threshold", "strong-bound"],
        &["threshold", "weak-bound"],
        &["solve"],
        &["certify"],
        &["experiment"],
        &["experiment", "example1"],
        &["experiment", "phase"],
        &["experiment", "strong-vs-weak"],
        &["experiment", "weak-probe"],
        &["experiment", "concentration"],
    ];
    for path in paths {
        let mut args = path.to_vec();
        args.push("--help");
        let o = run(&args, dir.path());
        assert_eq!(o.status.code(), Some(0), "{path:?}");
        assert!(stdout(&o).contains("Usage"), "{path:?}");
    }
}

#[test]
fn experiment_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("phase.json"),
        r#"{"n": 30, "m": 15, "p_list": [0.5, 1.0], "rho_grid": [0.1, 0.3], "trials_per_point": 4, "seed": 9}"#,
    )
    .unwrap();
    let args = ["experiment", "phase", "--spec", "phase.json", "--format", "csv", "--output"];
    let a = run(&[&args[..], &["a.csv"]].concat(), dir.path());
    let b = run(&[&args[..], &["b.csv"]].concat(), dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let fa = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(fa, std::fs::read(dir.path().join("b.csv")).unwrap());
    assert!(String::from_utf8(fa).unwrap().starts_with("mode,p,rho,success_rate,trials\nirls,0.5,0.1,"));

    std::fs::write(dir.path().join("ex1.json"), r#"{"k": 2}"#).unwrap();
    let o = run(&["experiment", "example1", "--spec", "ex1.json"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["claims"].as_array().unwrap().iter().all(|c| c["matches_expected"] == true));

    std::fs::write(dir.path().join("ex1.json"), r#"{"k": 2, "q": 1}"#).unwrap();
    let o = run(&["experiment", "example1", "--spec", "ex1.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1, column"));
}
