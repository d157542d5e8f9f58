use std::path::Path;

use paramodular::cli::run;
use paramodular::eisenstein::jacobi_eisenstein;
use paramodular::hecke::{expected_count, OpLabel};
use paramodular::io::{jacobi_to_json, read_paramodular};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("paramodular").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_eisenstein(dir: &Path, k: i64, level: i64, n: i64, m: i64) -> std::path::PathBuf {
    let file = dir.join(format!("e{k}_{level}.json"));
    let (code, _, err) = call(&[
        "eisenstein",
        "--weight",
        &k.to_string(),
        "--level",
        &level.to_string(),
        "--nmax",
        &n.to_string(),
        "--mmax",
        &m.to_string(),
        "--json",
        path(&file),
    ]);
    assert_eq!(code, 0, "{err}");
    file
}

#[test]
fn eisenstein_output_is_deterministic() {
    let (c1, a, _) = call(&["eisenstein", "--weight", "4", "--level", "2", "--nmax", "2", "--mmax", "2"]);
    let (c2, b, _) = call(&["eisenstein", "--weight", "4", "--level", "2", "--nmax", "2", "--mmax", "2"]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert!(a.contains("{\"n\":0,\"r\":0,\"m\":0,\"c\":\"1/1\"}"));
    let f = read_paramodular(&a).unwrap();
    assert_eq!((f.weight(), f.level()), (4, 2));
}

#[test]
fn file_output_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_eisenstein(dir.path(), 6, 1, 3, 3);
    let (_, stdout, _) = call(&["eisenstein", "--weight", "6", "--level", "1", "--nmax", "3", "--mmax", "3"]);
    assert_eq!(std::fs::read_to_string(file).unwrap(), stdout);
}

#[test]
fn passing_checks_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_eisenstein(dir.path(), 4, 2, 4, 4);
    for suite in ["maass", "lemma1", "corollary2"] {
        let (code, out, err) = call(&["check", "--suite", suite, "--in", path(&file)]);
        assert_eq!(code, 0, "{suite}: {out}{err}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.is_object());
    }
    let (code, out, _) = call(&["check", "--suite", "fricke", "--d", "2", "--in", path(&file)]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn failing_check_exits_one_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_eisenstein(dir.path(), 4, 1, 3, 3);
    let (code, out, _) = call(&["check", "--suite", "cusp", "--in", path(&file)]);
    assert_eq!(code, 1);
    assert!(out.contains("\"fail\""), "{out}");

    let text = std::fs::read_to_string(&file).unwrap();
    let broken = text.replacen("{\"n\":1,\"r\":0,\"m\":2,\"c\":\"", "{\"n\":1,\"r\":0,\"m\":2,\"c\":\"7", 1);
    assert_ne!(broken, text);
    let bad = dir.path().join("broken.json");
    std::fs::write(&bad, broken).unwrap();
    let (code, out, _) = call(&["check", "--suite", "maass", "--in", path(&bad)]);
    assert_eq!(code, 1, "{out}");
}

#[test]
fn invalid_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{\"weight\":4").unwrap();
    let missing = dir.path().join("missing.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["frobnicate"],
        vec!["eisenstein", "--weight", "4", "--level", "4", "--nmax", "1", "--mmax", "1"],
        vec!["eisenstein", "--weight", "3", "--level", "1", "--nmax", "1", "--mmax", "1"],
        vec!["check", "--suite", "maass", "--in", path(&garbage)],
        vec!["check", "--suite", "maass", "--in", path(&missing)],
        vec!["reps", "--op", "tnq", "--q", "4", "--level", "1"],
        vec!["reps", "--op", "jdiag", "--q", "2", "--level", "2"],
    ];
    for args in cases {
        let (code, out, err) = call(&args);
        assert_eq!(code, 2, "{args:?}: {out}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn hecke_eigenvalue_on_eisenstein() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_eisenstein(dir.path(), 4, 1, 8, 8);
    let (code, out, err) = call(&["hecke", "--op", "tnq", "--q", "2", "--in", path(&file), "--eigen", "--nmax", "1", "--mmax", "1"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("45/2"), "{out}");
}

#[test]
fn hecke_on_jacobi_input() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("phi.json");
    std::fs::write(&file, jacobi_to_json(&jacobi_eisenstein(4, 1, 30).unwrap())).unwrap();
    let (code, out, err) = call(&["hecke", "--op", "jdiag", "--q", "2", "--in", path(&file), "--eigen"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("33/2"), "{out}");
}

#[test]
fn lift_and_slice_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let phi = dir.path().join("phi.json");
    std::fs::write(&phi, jacobi_to_json(&jacobi_eisenstein(4, 2, 12).unwrap())).unwrap();
    let lifted = dir.path().join("lift.json");
    let (code, _, err) = call(&[
        "lift", "--weight", "4", "--level", "2", "--jacobi", path(&phi), "--nmax", "3", "--mmax", "3", "--json", path(&lifted),
    ]);
    assert_eq!(code, 0, "{err}");
    let (code, out, _) = call(&["check", "--suite", "maass", "--in", path(&lifted)]);
    assert_eq!(code, 0, "{out}");
    let (code, out, err) = call(&["slice", "--m", "1", "--in", path(&lifted)]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("\"index\":2"), "{out}");
}

#[test]
fn reps_dump_has_expected_size() {
    let (code, out, err) = call(&["reps", "--op", "tstarq", "--q", "3", "--level", "2"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["sanity"]["cardinality"], expected_count(OpLabel::TStarN, 3, 2) as u64);
    assert_eq!(v["sanity"]["passed"], true);
}
