use std::path::PathBuf;
use std::process::Command;

use causalog::cli::{run, EXIT_ERROR, EXIT_NO, EXIT_UNKNOWN, EXIT_YES};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("causalog").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn field<'a>(out: &'a str, key: &str) -> Option<&'a str> {
    out.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix(": "))
}

#[test]
fn unsat_example() {
    let (code, out, _) = call(&["sat", "P(X=1) > 1/2 & P(X=0) > 1/2"]);
    assert_eq!(code, EXIT_NO);
    assert_eq!(field(&out, "verdict"), Some("UNSAT"));
}

#[test]
fn check_example() {
    let m1 = data("prop2_m1.scm");
    let (code, out, _) = call(&["check", &m1, "P([X=1]Y=1) == 1"]);
    assert_eq!((code, field(&out, "holds")), (EXIT_YES, Some("true")));
    let (code, _, _) = call(&["check", &data("prop2_m2.scm"), "P([X=1]Y=1) == 1"]);
    assert_eq!(code, EXIT_NO);
}

#[test]
fn dsep_example() {
    let g = data("fig1.g");
    let (code, out, _) = call(&["dsep", &g, "Z", "X", "", "--underline", "X"]);
    assert_eq!((code, field(&out, "dseparated")), (EXIT_YES, Some("true")));
    let (code, _, _) = call(&["dsep", &g, "Z", "X", ""]);
    assert_eq!(code, EXIT_NO);
}

#[test]
fn prob_and_parse() {
    let (code, out, _) = call(&["prob", &data("prop3_m1.scm"), "P([X=0]Y=0 & [X=1]Y=1)"]);
    assert_eq!((code, field(&out, "value")), (EXIT_YES, Some("1/3")));
    let (code, out, _) = call(&["prob", &data("prop3_m1.scm"), "[X=0]Y=0 & [X=1]Y=1"]);
    assert_eq!((code, field(&out, "value")), (EXIT_YES, Some("1/3")));
    let (code, out, _) = call(&["parse", "P([X=1]Y=1) >= 1/2"]);
    assert_eq!(code, EXIT_YES);
    assert_eq!(field(&out, "level"), Some("2"));
    assert_eq!(field(&out, "kind"), Some("formula"));
    let (code, _, err) = call(&["--level", "1", "parse", "P([X=1]Y=1) >= 1/2"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("level 2"), "{err}");
}

#[test]
fn usage_errors() {
    assert_eq!(call(&["bogus"]).0, EXIT_ERROR);
    assert_eq!(call(&["sat", "P(X=1) >"]).0, EXIT_ERROR);
    let (code, _, err) = call(&["check", "/nonexistent.scm", "P(X=1) >= 0"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("/nonexistent.scm"), "{err}");
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_YES);
    assert!(out.contains("Usage"));
}

#[test]
fn unknown_and_nra_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.smt2");
    let (code, out, _) = call(&["sat", "P(X=1) * P(X=1) == 1/2", "--export-nra", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_UNKNOWN);
    assert_eq!(field(&out, "verdict"), Some("UNKNOWN"));
    let smt = std::fs::read_to_string(&path).unwrap();
    assert!(smt.contains("(set-logic QF_NRA)") && smt.contains("(check-sat)"), "{smt}");
    causalog_core::realsolve::import_nra(&smt).unwrap();
}

#[test]
fn valid_and_counter_model() {
    let (code, out, _) = call(&["valid", "P([X=1, Y=1]Z=1) - P([Y=1](X=1 & Z=1)) - P([X=1](Y=1 & Z=1)) + P(X=1 & Y=1 & Z=1) >= 0"]);
    assert_eq!((code, field(&out, "verdict")), (EXIT_YES, Some("VALID")));
    let (code, out, _) = call(&["valid", "P(Y=1 | X=1) == P([X=1]Y=1)"]);
    assert_eq!((code, field(&out, "verdict")), (EXIT_NO, Some("INVALID")));
    assert!(out.contains("witness:\nvariables\n"));
}

#[test]
fn prove_bundled_derivation() {
    let (code, out, _) = call(&["prove", &data("front_door.proof")]);
    assert_eq!((code, field(&out, "verdict")), (EXIT_YES, Some("ACCEPTED")));
    let (code, out, _) = call(&["prove", &data("front_door.proof"), "--system", "AX1"]);
    assert_eq!((code, field(&out, "line")), (EXIT_NO, Some("1")));
}

#[test]
fn docalc_and_gen_axiom() {
    let (code, out, _) = call(&["docalc", &data("fig1.g"), "--rule", "2", "--y", "Z", "--z", "X", "--instances"]);
    assert_eq!(code, EXIT_YES);
    assert_eq!(out.lines().filter(|l| l.starts_with("instance: ")).count(), 4);
    let (code, _, _) = call(&["docalc", &data("fig1.g"), "--rule", "2", "--y", "Y", "--z", "X"]);
    assert_eq!(code, EXIT_NO);
    let (code, out, _) = call(&["gen-axiom", "Add2", "X=1; Y=1; Z=0"]);
    assert_eq!(code, EXIT_YES);
    assert_eq!(field(&out, "formula"), Some("P([X=1](Y=1 & Z=0)) + P([X=1](Y=1 & Z!=0)) >= P([X=1]Y=1) & P([X=1]Y=1) >= P([X=1](Y=1 & Z=0)) + P([X=1](Y=1 & Z!=0))"));
    let (code, out, _) = call(&["gen-axiom", "Def", "X"]);
    assert_eq!((code, field(&out, "event")), (EXIT_YES, Some("~(X=0 & X=1) & ~(X!=0 & X!=1)")));
    assert_eq!(call(&["gen-axiom", "ProbRec", "X 0 1 1; Y 0 1 1"]).0, EXIT_YES);
    assert_eq!(call(&["gen-axiom", "Bool", ""]).0, EXIT_ERROR);
}

#[test]
fn simulation_programs() {
    let prog = data("copy.prog");
    let (code, out, _) = call(&["sim", "run", &prog, "1"]);
    assert_eq!(code, EXIT_YES);
    assert_eq!((field(&out, "X"), field(&out, "Y")), (Some("1"), Some("1")));
    let (_, out, _) = call(&["sim", "run", &prog, "1", "--do", "X=0"]);
    assert_eq!((field(&out, "X"), field(&out, "Y")), (Some("0"), Some("0")));
    let (_, out, _) = call(&["sim", "dist", &prog]);
    assert_eq!(out, "X=0,Y=0: 1/2\nX=1,Y=1: 1/2\n");
    assert_eq!(call(&["sim", "equiv", &prog, &data("prop2_m1.scm")]).0, EXIT_YES);
    let (code, out, _) = call(&["sim", "equiv", &prog, &data("prop2_m2.scm"), "--do", "X=1"]);
    assert_eq!(code, EXIT_NO);
    assert_eq!(field(&out, "instantiation"), Some("X=1,Y=0"));
    assert_eq!((field(&out, "program"), field(&out, "model")), (Some("0"), Some("1/2")));
    assert_eq!(call(&["sim", "compile", &data("prop3_m1.scm")]).0, EXIT_ERROR);
    let (code, out, _) = call(&["sim", "compile", &data("prop3_m1.scm"), "--approx-bits", "3"]);
    assert_eq!((code, field(&out, "tv_bound")), (EXIT_YES, Some("1/6")));
    let (code, out, _) = call(&["sim", "tabulate", &prog]);
    assert_eq!(code, EXIT_YES);
    let model = causalog::scm_file::parse_scm(out.strip_prefix("model:\n").unwrap()).unwrap();
    assert!(causalog_core::semantics::model_check(&model, &causalog_core::formula::parse_formula("P([X=1]Y=1) == 1", None).unwrap()).unwrap());
}

#[test]
fn output_is_deterministic() {
    let f = "P(X=1) * P(Y=1) > P(X=1 & Y=1) & P([X=1]Y=1) > 1/2";
    let a = call(&["--seed", "7", "sat", f]);
    assert_eq!(a, call(&["--seed", "7", "sat", f]));
    assert_eq!(a.1, call(&["--seed", "7", "--jobs", "4", "sat", f]).1);
}

/// Every witness `sat` writes re-checks with `check` through the real
/// binary.
#[test]
fn witness_round_trip_through_the_binary() {
    let bin = env!("CARGO_BIN_EXE_causalog");
    let dir = tempfile::tempdir().unwrap();
    let formulas = [
        "P([X=1]Y=1) > P(Y=1 | X=1) & P(X=1) > 0",
        "P(X=1) * P(Y=1) > P(X=1 & Y=1)",
        "P([X=0]Y=0 & [X=1]Y=1) > 1/4 & P(Y=1 | X=1) < 1/2",
        "P(X=1) == 1/3 | P([Y=1]X=1) > P(X=1)",
    ];
    for (i, f) in formulas.iter().enumerate() {
        let w = dir.path().join(format!("w{i}.scm"));
        let sat = Command::new(bin).args(["sat", f, "--witness", w.to_str().unwrap()]).output().unwrap();
        assert_eq!(sat.status.code(), Some(EXIT_YES), "{f}: {}", String::from_utf8_lossy(&sat.stdout));
        let check = Command::new(bin).args(["check", w.to_str().unwrap(), f]).output().unwrap();
        assert_eq!(check.status.code(), Some(EXIT_YES), "{f}: {}", String::from_utf8_lossy(&check.stdout));
        assert_eq!(String::from_utf8(check.stdout).unwrap(), "holds: true\n");
    }
}
