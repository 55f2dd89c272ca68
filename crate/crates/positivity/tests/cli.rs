use positivity::mdp::Mdp;
use positivity::reductions::ReductionOutput;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const NEG: &str = r#"{"order":2,"coefficients":["1/32","-1/32"],"initials":["1/512","1/1024"]}"#;
const FIB: &str = r#"{"order":2,"coefficients":["1","1"],"initials":["0","1"]}"#;

fn dir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("positivity-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn file(d: &Path, name: &str, body: &str) -> String {
    let p = d.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_positivity")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn reduce_writes_instance() {
    let d = dir("reduce");
    let lrs = file(&d, "lrs.json", NEG);
    let out = d.join("inst.json");
    let o = run(&["reduce", "--target", "max-termination", "--in", &lrs, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("optimum >"));
    let inst: ReductionOutput = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(inst.target.name(), "max-termination");
}

#[test]
fn reduce_is_deterministic() {
    let d = dir("determinism");
    let lrs = file(&d, "lrs.json", NEG);
    let a = run(&["reduce", "--target", "two-sided-partial", "--in", &lrs]);
    let b = run(&["reduce", "--target", "two-sided-partial", "--in", &lrs]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn reduce_trivially_negative() {
    let d = dir("trivial");
    let lrs = file(&d, "lrs.json", r#"{"order":2,"coefficients":["1/32","-1/32"],"initials":["-1","1"]}"#);
    let o = run(&["reduce", "--target", "max-termination", "--in", &lrs]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("u_0 = -1 < 0"), "{}", stderr(&o));
}

#[test]
fn reduce_cvar_fixes_p() {
    let d = dir("cvar");
    let lrs = file(&d, "lrs.json", NEG);
    let o = run(&["reduce", "--target", "cvar", "--in", &lrs]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains(r#""cvar_p": "1/2""#));
}

#[test]
fn parse_errors_exit_2() {
    let d = dir("parse");
    let bad = file(&d, "bad.json", r#"{"order":3,"coefficients":["1"],"initials":["1"]}"#);
    assert_eq!(code(&run(&["reduce", "--target", "max-termination", "--in", &bad])), 2);
    assert_eq!(code(&run(&["eval-lrs", "--in", &bad])), 2);
    let junk = file(&d, "junk.json", "not json");
    assert_eq!(code(&run(&["reduce", "--target", "max-termination", "--in", &junk])), 2);
    // unknown flags and targets are rejected by the parser
    assert_eq!(code(&run(&["reduce", "--target", "nope", "--in", &junk])), 2);
    assert_eq!(code(&run(&["info", "--bogus"])), 2);
}

#[test]
fn verify_passes_then_fails_on_corruption() {
    let d = dir("verify");
    let lrs = file(&d, "lrs.json", NEG);
    let inst = d.join("inst.json");
    let inst_s = inst.to_str().unwrap();
    assert_eq!(code(&run(&["reduce", "--target", "max-termination", "--in", &lrs, "--out", inst_s])), 0);
    let report = d.join("report.json");
    let o = run(&["verify", "--instance", inst_s, "--lrs", &lrs, "--window", "30", "--out", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("n <= 30"), "window override not applied");
    assert!(std::fs::read_to_string(&report).unwrap().contains("\"status\": \"pass\""));

    let text = std::fs::read_to_string(&inst).unwrap().replacen("\"15/16\"", "\"14/16\"", 1);
    let bad = file(&d, "bad.json", &text);
    let o = run(&["verify", "--instance", &bad, "--lrs", &lrs]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("FAIL mdp-valid"), "{}", stderr(&o));

    let other = file(&d, "other.json", FIB);
    assert_eq!(code(&run(&["verify", "--instance", inst_s, "--lrs", &other])), 1);
}

#[test]
fn eval_lrs_prints_terms() {
    let d = dir("eval");
    let fib = file(&d, "fib.json", FIB);
    let o = run(&["eval-lrs", "--in", &fib, "--n", "10"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 11);
    assert_eq!(out.lines().last(), Some("55"));
    assert!(stderr(&o).contains("first-negative: none"));

    let neg = file(&d, "neg.json", NEG);
    let o = run(&["eval-lrs", "--in", &neg, "--n", "5"]);
    assert!(stderr(&o).contains("first-negative: 2"));
    assert_eq!(stdout(&o).lines().nth(2), Some("-1/32768"));

    let o = run(&["eval-lrs", "--in", &neg, "--n", "0"]);
    assert_eq!(stdout(&o), "1/512\n");
}

#[test]
fn export_formats() {
    let d = dir("export");
    let lrs = file(&d, "lrs.json", NEG);
    let reduce_to = |target: &str, name: &str| {
        let p = d.join(name);
        assert_eq!(code(&run(&["reduce", "--target", target, "--in", &lrs, "--out", p.to_str().unwrap()])), 0);
        p.to_string_lossy().into_owned()
    };

    let inst = reduce_to("max-termination", "inst.json");
    let o = run(&["export", "--instance", &inst, "--format", "json"]);
    assert_eq!(code(&o), 0);
    let parsed: ReductionOutput = serde_json::from_str(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    let m: Mdp = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(m, parsed.mdp);

    let cond = reduce_to("conditional-sspp-max", "cond.json");
    assert_eq!(code(&run(&["export", "--instance", &cond, "--format", "prism"])), 4);
    let o = run(&["export", "--instance", &cond, "--format", "prism", "--integerize"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("mdp"));

    let oc = reduce_to("one-counter-max-termination", "oc.json");
    let o = run(&["export", "--instance", &oc, "--format", "json", "--unary"]);
    assert_eq!(code(&o), 0);
    let m: Mdp = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(m.weights().all(|w| w.is_integer() && w.numer().magnitude() <= &1u32.into()));
    assert_eq!(code(&run(&["export", "--instance", &oc, "--format", "prism", "--unary"])), 0);
}

#[test]
fn info_lists_targets_and_summarizes() {
    let o = run(&["info"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 14);
    let d = dir("info");
    let lrs = file(&d, "lrs.json", NEG);
    let inst = d.join("inst.json");
    run(&["reduce", "--target", "cvar-max", "--in", &lrs, "--out", inst.to_str().unwrap()]);
    let o = run(&["info", "--instance", inst.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("cvar p      1/2"));
}
