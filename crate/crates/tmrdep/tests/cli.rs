use std::path::Path;
use std::process::{Command, Output};

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");

fn tmrdep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmrdep"))
        .args(args)
        .env_remove("TMRDEP_LIBRARY")
        .output()
        .unwrap()
}

fn point_args<'a>(dfg: &'a str, lib: &'a str) -> Vec<&'a str> {
    vec!["--dfg", dfg, "--library", lib, "--model", "combined", "--partitions", "2", "--scrub", "1h"]
}

fn paths() -> (String, String) {
    (format!("{DATA}/fir8.json"), format!("{DATA}/library.csv"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_prints_one_row() {
    let (dfg, lib) = paths();
    let mut args = vec!["analyze"];
    args.extend(point_args(&dfg, &lib));
    let o = tmrdep(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("combined,2,3600.00000000,"), "{text}");
}

#[test]
fn properties_and_exit_codes() {
    let (dfg, lib) = paths();
    let mut args = vec!["analyze", "--property", "P=?[G[0,T] up]", "--property", "forall next operational"];
    args.extend(point_args(&dfg, &lib));
    let o = tmrdep(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("filter(forall, P>0 [X operational]) = true"));

    let mut args = vec!["check", "--property", "forall next failed"];
    args.extend(point_args(&dfg, &lib));
    assert_eq!(tmrdep(&args).status.code(), Some(3));

    let mut args = vec!["check"];
    args.extend(point_args(&dfg, &lib));
    assert_eq!(tmrdep(&args).status.code(), Some(0));

    let mut args = vec!["check", "--property", "P=?[up U down]"];
    args.extend(point_args(&dfg, &lib));
    let o = tmrdep(&args);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsupported construct at position"));
}

#[test]
fn input_errors_exit_one() {
    let (dfg, lib) = paths();
    assert_eq!(tmrdep(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(tmrdep(&["analyze", "--dfg", &dfg]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cyclic = dir.path().join("cyclic.json");
    std::fs::write(&cyclic, r#"{"nodes":[{"id":"a","kind":"adder"}],"edges":[["a","a"]]}"#).unwrap();
    let o = tmrdep(&["analyze", "--dfg", cyclic.to_str().unwrap(), "--library", &lib]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cyclic graph"));
    let mut args = vec!["sweep", "--scrub", "0s"];
    args.extend(["--dfg", &dfg, "--library", &lib]);
    assert_eq!(tmrdep(&args).status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_two() {
    let (dfg, lib) = paths();
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("huge.toml");
    std::fs::write(&cfg, "lambda_bit = 1e306\n").unwrap();
    let mut args = vec!["analyze", "--config", cfg.to_str().unwrap()];
    args.extend(point_args(&dfg, &lib));
    let o = tmrdep(&args);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn library_from_environment_and_out_file() {
    let (dfg, lib) = paths();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("model.pm");
    let o = Command::new(env!("CARGO_BIN_EXE_tmrdep"))
        .args(["export-prism", "--dfg", &dfg, "--partitions", "2", "--out", out.to_str().unwrap()])
        .env("TMRDEP_LIBRARY", &lib)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_to_string(&out).unwrap().contains("module p2"));
}

#[test]
fn simulate_is_reproducible() {
    let (dfg, lib) = paths();
    let mut args = vec!["simulate", "--trials", "3000", "--seed", "5", "--jobs", "2"];
    args.extend(point_args(&dfg, &lib));
    let a = tmrdep(&args);
    args[6] = "3";
    let b = tmrdep(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("metric,estimate,half_width_99,lower,upper,trials,seed\nreliability,"));
}

#[test]
fn sweep_config_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let cfg = Path::new(DATA).join("sweep.toml");
    let o = tmrdep(&[
        "sweep", "--config", cfg.to_str().unwrap(), "--partitions", "1,2", "--scrub", "15min", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 5);
}
