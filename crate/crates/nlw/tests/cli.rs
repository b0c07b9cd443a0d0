use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_penrose-nlw"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn malformed_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\"experiment\": \"evolve\", \"alpha\": }").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("config"));
}

#[test]
fn alpha_out_of_range_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--experiment", "evolve", "--alpha", "3.5"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("alpha must lie in [2,3)"),
        "{}",
        stderr(&o)
    );
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn zero_data_evolves_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "--experiment",
            "evolve",
            "--data",
            "zero",
            "-N",
            "8",
            "--alpha",
            "2.5",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("T,c_1_re,c_1_im"));
    let mut rows = 0;
    for line in lines {
        rows += 1;
        assert!(line.split(',').skip(1).all(|v| v == "0.0"), "{line}");
    }
    assert!(rows > 1);
}

#[test]
fn outputs_are_reproducible_and_worker_independent() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "--experiment",
        "sample",
        "-N",
        "16",
        "--samples",
        "12",
        "--seed",
        "7",
    ];
    let oa = run(&[&args[..], &["--workers", "1"]].concat(), a.path());
    let ob = run(&[&args[..], &["--workers", "3"]].concat(), b.path());
    assert_eq!(oa.status.code(), Some(0), "{}", stderr(&oa));
    assert_eq!(ob.status.code(), Some(0), "{}", stderr(&ob));
    let read = |d: &Path| std::fs::read(d.join("samples.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn report_is_sorted_and_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["--experiment", "evolve", "-N", "8", "--span", "-0.5,0.5"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let top: Vec<&String> = value.as_object().unwrap().keys().collect();
    assert_eq!(top, ["config", "metrics", "provenance", "verdicts"]);
    let cfg = &value["config"];
    assert_eq!(cfg["N"], 8);
    assert_eq!(cfg["M"], 32);
    assert_eq!(cfg["span"][0], -0.5);
    let metrics: Vec<&String> = value["metrics"].as_object().unwrap().keys().collect();
    let positions: Vec<usize> = metrics
        .iter()
        .map(|k| text.find(&format!("\"{k}\"")).unwrap())
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(value["verdicts"]["energy_conservation"]["passed"], true);
}

#[test]
fn verify_subset_prints_one_line_per_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--experiment", "verify", "--criteria", "1,3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let lines: Vec<&str> = stdout
        .lines()
        .filter(|l| l.starts_with("criterion"))
        .collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| l.contains(" PASS ")));
}
