use std::path::{Path, PathBuf};

use clap::Parser;
use crashlens::cli::{run, Cli};
use serde_json::Value;

struct Output {
    code: i32,
    out: String,
    err: String,
}

fn crashlens(args: &[&str]) -> Output {
    let cli = Cli::try_parse_from(std::iter::once("crashlens").chain(args.iter().copied())).expect("arguments parse");
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(cli, &mut out, &mut err);
    Output {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn example(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn source(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path: PathBuf = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const LEN: &str = "let len = rec len(x) -> match x { Nil -> Zero | Cons(h, t) -> Succ(len t) };\n";

#[test]
fn analyze_json_matches_golden() {
    let path = example("length.lc");
    let run = crashlens(&["analyze", &path, "--json"]);
    assert_eq!(run.code, 0, "{}", run.err);
    let got = run.out.replace(&path, "examples/length.lc");
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/length.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&golden, &got).unwrap();
    }
    assert_eq!(got, std::fs::read_to_string(golden).unwrap());
}

#[test]
fn analyze_json_is_byte_stable() {
    let path = example("check_length.lc");
    let first = crashlens(&["analyze", &path, "--json", "-k", "4"]);
    let second = crashlens(&["analyze", &path, "--json", "-k", "4"]);
    assert_eq!(first.out, second.out);
}

#[test]
fn analyze_json_follows_the_schema() {
    let files = [
        example("length.lc"),
        example("check_length.lc"),
        example("generator.lc"),
    ];
    let mut args = vec!["analyze", "--json"];
    args.extend(files.iter().map(String::as_str));
    let run = crashlens(&args);
    let reports: Value = serde_json::from_str(&run.out).unwrap();
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    for (report, file) in reports.iter().zip(&files) {
        assert_eq!(report["file"], file.as_str(), "reports keep input order");
        for d in report["definitions"].as_array().unwrap() {
            let keys: Vec<&str> = d.as_object().unwrap().keys().map(String::as_str).collect();
            assert_eq!(keys.len(), 6, "{keys:?}");
            assert!(d["def"].is_string() && d["type"].is_string() && d["crash_condition"].is_string());
            assert!(["crash", "no_crash_at_bound", "unknown"].contains(&d["verdict"].as_str().unwrap()));
            assert_eq!(d["k"], 5);
            assert!(d["witnesses"].as_array().unwrap().iter().all(Value::is_string));
        }
    }
}

#[test]
fn analyze_reports_the_length_type() {
    let run = crashlens(&["analyze", &example("length.lc")]);
    assert_eq!(run.code, 0);
    assert!(run.out.contains(
        "len : mu X0.[a0](Zero | Succ(X0<Cons.2(a0)>)) & (Nil notin a0 /\\ (Cons in a0 /\\ crash X0<Cons.2(a0)> \\/ Cons notin a0))"
    ));
    assert!(run.out.contains("  crashes on: Zero, int, "));
    assert!(run.out.contains("  verdict: no_crash_at_bound(5)"));
}

#[test]
fn check_cites_the_crash_condition() {
    let run = crashlens(&["check", &example("length.lc")]);
    assert_eq!(run.code, 1);
    assert!(run.out.contains("main: definite error: Nil notin Zero"), "{}", run.out);
}

#[test]
fn check_respects_the_budget() {
    let path = example("check_length.lc");
    assert_eq!(crashlens(&["check", &path, "-k", "5"]).code, 1);
    let shallow = crashlens(&["check", &path, "-k", "2"]);
    assert_eq!(shallow.code, 0);
    assert!(shallow.out.ends_with("main: unknown(2)\n"), "{}", shallow.out);
}

#[test]
fn check_passes_programs_that_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let ok = source(&dir, "ok.lc", &format!("{LEN}len Cons(1, Cons(2, Nil))"));
    assert_eq!(crashlens(&["check", &ok]).code, 0);
    assert_eq!(crashlens(&["eval", &ok]).out, "Succ(Succ(Zero))\n");
}

#[test]
fn eval_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let five = crashlens(&["eval", &source(&dir, "ok.lc", "5")]);
    assert_eq!((five.code, five.out.as_str()), (0, "5\n"));
    let crash = crashlens(&["eval", &example("length.lc")]);
    assert_eq!((crash.code, crash.out.as_str()), (3, "err\n"));
    let diverge = crashlens(&["eval", &example("generator.lc"), "--fuel", "200"]);
    assert_eq!(diverge.code, 4);
    assert!(
        diverge.out.contains("fuel exhausted after 200 steps"),
        "{}",
        diverge.out
    );
}

#[test]
fn parse_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let bad = source(
        &dir,
        "bad.lc",
        "let f = rec f(x) ->\n  match x { Nil -> 1 | Nil -> 2 };\nf Nil",
    );
    for cmd in ["analyze", "check", "eval"] {
        let run = crashlens(&[cmd, &bad]);
        assert_eq!(run.code, 2, "{cmd}");
        assert!(run.err.starts_with(&format!("{bad}:2:")), "{cmd}: {}", run.err);
    }
    let missing = crashlens(&["check", &dir.path().join("absent.lc").to_string_lossy()]);
    assert_eq!(missing.code, 2);
    assert!(!missing.err.is_empty());
}

#[test]
fn arity_clash_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = source(&dir, "arity.lc", "Pair(Succ(Zero), Succ)");
    assert_eq!(crashlens(&["analyze", &bad]).code, 2);
}

#[test]
fn fuzz_passes_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("failures");
    let run = crashlens(&["fuzz", "--cases", "40", "--seed", "9", "--out", &out.to_string_lossy()]);
    assert_eq!(run.code, 0, "{}", run.out);
    assert_eq!(run.out.lines().count(), 8);
    assert!(
        run.out.lines().all(|l| l.ends_with(": 40 cases, 0 failures")),
        "{}",
        run.out
    );
    assert!(!out.exists() || std::fs::read_dir(&out).unwrap().next().is_none());
}

#[test]
fn fuzz_runs_one_property() {
    let run = crashlens(&["fuzz", "--cases", "25", "--property", "round-trip"]);
    assert_eq!(run.out, "round-trip: 25 cases, 0 failures\n");
}

#[test]
fn invalid_arguments_are_rejected() {
    assert!(Cli::try_parse_from(["crashlens", "fuzz", "--property", "nope"]).is_err());
    assert!(Cli::try_parse_from(["crashlens", "eval", "x.lc", "--fuel", "0"]).is_err());
    assert!(Cli::try_parse_from(["crashlens", "analyze"]).is_err());
}

#[test]
fn binary_exit_code() {
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_crashlens"))
        .args(["check", &example("length.lc")])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&status.stdout).contains("definite error"));
}
