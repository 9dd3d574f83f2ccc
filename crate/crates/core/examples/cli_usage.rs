// Drives the command-line front end in-process: writes a basis and a job
// file, then certifies, solves and queries a threshold.

use lp_recovery::cli::dispatch;

pub fn run_example() -> lp_recovery::Result<()> {
    let dir = std::env::temp_dir().join(format!("lp-recovery-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = |name: &str| dir.join(name).to_string_lossy().into_owned();
    std::fs::write(path("sectional.csv"), "16\n16\n1\n36\n")?;
    std::fs::write(path("a.csv"), "1,0,2,1\n0,1,1,-1\n")?;
    std::fs::write(path("x.csv"), "0\n0\n3\n0\n")?;
    std::fs::write(path("job.json"), r#"{"matrix": "a.csv", "x_true": "x.csv", "p": 0.5}"#)?;

    let runs: Vec<Vec<String>> = vec![
        vec!["threshold".into(), "strong-limit".into(), "--p".into(), "0.5".into()],
        vec![
            "certify".into(),
            "--matrix".into(),
            path("sectional.csv"),
            "--mode".into(),
            "sectional".into(),
            "--p".into(),
            "0.5".into(),
            "--support".into(),
            "1,2".into(),
            "--format".into(),
            "csv".into(),
            "--output".into(),
            path("verdict.csv"),
        ],
        vec!["solve".into(), "--instance".into(), path("job.json"), "--method".into(), "l1".into(), "--format".into(), "csv".into()],
    ];
    for args in runs {
        let code = dispatch(std::iter::once("lp-recovery".to_string()).chain(args.iter().cloned()));
        println!("exit code {code} for {}", args[..2].join(" "));
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> lp_recovery::Result<()> {
    run_example()
}
