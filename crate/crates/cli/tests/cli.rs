use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sl2kirby")).args(args).current_dir(root()).output().unwrap()
}

fn run_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sl2kirby"))
        .args(args)
        .env("SL2KIRBY_THREADS", threads)
        .current_dir(root())
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn lens_example() {
    let o = run(&["lens", "2", "--order", "4"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("O: 1/2 + 0·ħ − 1/64·ħ² + "), "{}", stdout(&o));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["lens"][..],
        &["frobnicate"],
        &["skein"],
        &["skein", "--theta", "1", "1", "1"],
        &["skein", "--jones-wenzl", "6", "--prime", "7"],
        &["kirby", "--diagram", "data/slide.diag", "--prime", "9"],
        &["lens", "0"],
        &["verify", "--suite", "nothing"],
        &["weight", "--diagram", "data/missing.diag", "--colors", "1"],
        &["weight", "--diagram", "data/tripod.diag", "--colors", "1,2"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty(), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn failed_checks_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&["fermat", "--diagram", "data/theta.diag", "--framing", "2", "--primes", "7,11", "--emit", d]);
    assert!(o.status.success());
    let o = run(&["fermat", "--sequence", d, "--limit", &format!("{d}/limit.series")]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("p=7: PASS\np=11: PASS\nthreshold: 0\n"));

    let limit = std::fs::read_to_string(dir.path().join("limit.series")).unwrap();
    let broken: String = limit.lines().map(|l| if l.starts_with("hbar^1:") { "hbar^1: 2/5\n".into() } else { format!("{l}\n") }).collect();
    std::fs::write(dir.path().join("limit.series"), broken).unwrap();
    let o = run(&["fermat", "--sequence", d, "--limit", &format!("{d}/limit.series")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("p=7: FAIL\np=7.first_mismatch: hbar^1\n"), "{}", stdout(&o));
    assert!(stdout(&o).contains("threshold: 11"));
}

#[test]
fn inequivalent_pair_fails() {
    let o = run(&["kirby", "--check-pair", "data/tripod.diag", "data/slide.diag", "--prime", "5"]);
    assert_eq!(o.status.code(), Some(2), "circle counts differ");
    let o = run(&["kirby", "--check-pair", "data/theta.diag", "data/tripod_stu.diag", "--prime", "5"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("equal: FAIL"));
}

#[test]
fn output_is_independent_of_threads() {
    for args in [
        &["verify", "--suite", "all", "--seed", "7"][..],
        &["fermat", "--diagram", "data/theta.diag", "--framing", "-1", "--primes", "7,11,13", "--flavor", "so3"],
        &["invariant", "--link", "union(unknot f=2, unknot f=-3)", "--order", "5", "--format", "structured"],
    ] {
        let one = run_threads(args, "1");
        let four = run_threads(args, "4");
        assert!(one.status.success(), "{args:?}: {}", String::from_utf8_lossy(&one.stderr));
        assert_eq!(one.stdout, four.stdout, "{args:?}");
        assert_eq!(one.stdout, run_threads(args, "4").stdout);
    }
}

#[test]
fn seed_is_recorded() {
    let o = run(&["verify", "--suite", "gauss", "--seed", "12345", "--format", "structured"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("suite=gauss\nseed=12345\n"), "{s}");
    assert!(s.ends_with("failed=0\n"));
}

#[test]
fn structured_series_are_exact() {
    let o = run(&["invariant", "--link", "unknot f=1", "--order", "2", "--format", "structured"]);
    assert_eq!(stdout(&o), "link=unknot f=1\nF.hbar^0=-2\nF.hbar^1=3/2\nF.hbar^2=-23/48\nO.hbar^0=1\nO.hbar^1=0\nO.hbar^2=0\n");
}

#[test]
fn every_suite_passes() {
    for suite in ["skein", "spin", "weight", "kirby", "gauss", "invariants"] {
        let o = run(&["verify", "--suite", suite]);
        assert!(o.status.success(), "{suite}: {}", stdout(&o));
    }
}
