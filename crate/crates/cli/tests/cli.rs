use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latticeborell")).args(args).output().expect("binary runs")
}

fn run_to_file(experiment: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![experiment, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    cli(&args)
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    for (experiment, name) in [("meanwidth", "box1-meanwidth.json"), ("borell", "box2-borell.json"), ("cq", "cross2-cq.json")] {
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        assert!(run_to_file(experiment, &fixture(name), &a, &["--threads", "1"]).status.success());
        assert!(run_to_file(experiment, &fixture(name), &b, &["--threads", "4"]).status.success());
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{name}");
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run_to_file("meanwidth", &fixture("box1-meanwidth.json"), &a, &["--seed", "1"]);
    run_to_file("meanwidth", &fixture("box1-meanwidth.json"), &b, &["--seed", "2"]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn csv_report_has_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = run_to_file("convergence", &fixture("box1-convergence.json"), &out, &[]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("row,lambda,count,"));
    assert!(text.lines().last().unwrap().starts_with("2,100.0,40401,4.0401,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    assert_eq!(run_to_file("counterexample", &fixture("counterexample.json"), &out, &[]).status.code(), Some(0));

    // An impossible convergence limit makes the final-gap check fail.
    let strict = dir.path().join("strict.json");
    std::fs::write(
        &strict,
        r#"{"experiment": "convergence", "body": {"variant": "ball", "n": 2, "radius": 1},
            "sweeps": {"lambda": [2, 3, 4]}, "tolerances": {"convergence_gap": 0.001}}"#,
    )
    .unwrap();
    let o = run_to_file("convergence", &strict, &out, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL final-gap-p1"));

    assert_eq!(run_to_file("borell", &fixture("counterexample.json"), &out, &[]).status.code(), Some(2));
    assert_eq!(run_to_file("borell", &dir.path().join("missing.json"), &out, &[]).status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"experiment": "counterexample", "sweeps": {"lambda": [4, 4]}}"#).unwrap();
    assert_eq!(run_to_file("counterexample", &bad, &out, &[]).status.code(), Some(2));
    assert_eq!(cli(&["nonsense", "--config", "x"]).status.code(), Some(2));
}

#[test]
fn report_goes_to_stdout_without_out() {
    let o = cli(&["enumerate", "--config", fixture("box2-enumerate.json").to_str().unwrap()]);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 3);
    assert!(stdout.starts_with(r#"{"row":0,"lambda":1.0,"count":25,"#));
}
