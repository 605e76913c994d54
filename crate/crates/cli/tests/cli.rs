use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn weylnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylnorm")).args(args).env_remove("WEYLNORM_FIXTURES").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn export(dir: &Path, entry: &str, rootsystem: bool) -> PathBuf {
    let mut args = vec!["catalog", "export", entry];
    if rootsystem {
        args.push("--rootsystem");
    }
    let o = weylnorm(&args);
    assert!(o.status.success());
    let file = format!("{}{}.txt", entry.replace(['(', ')'], "_"), if rootsystem { "_rs" } else { "" });
    write(dir, &file, &stdout(&o))
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exported_entries() {
    let dir = TempDir::new().unwrap();
    for entry in ["SU(2)", "SO(3)", "G2", "Spin(5)"] {
        for rs in [false, true] {
            let o = weylnorm(&["validate", s(&export(dir.path(), entry, rs))]);
            assert_eq!(o.status.code(), Some(0), "{entry}: {}", stdout(&o));
            assert!(stdout(&o).ends_with("valid\n"));
        }
    }
}

#[test]
fn added_multiple_root_names_r3() {
    let dir = TempDir::new().unwrap();
    let base = std::fs::read_to_string(export(dir.path(), "SU(2)", true)).unwrap();
    let bad = write(dir.path(), "bad.txt", &format!("{base}root 2 coroot -1\n"));
    let o = weylnorm(&["validate", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL R3"), "{}", stdout(&o));
    let v = json(&weylnorm(&["--json", "validate", s(&bad)]));
    let failed: Vec<&str> =
        v["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).map(|c| c["name"].as_str().unwrap()).collect();
    assert!(failed.contains(&"R3"), "{failed:?}");
}

#[test]
fn parse_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "t.txt", "kind lattice\nname SU(2)\nrank 1\ngenerator\n");
    let o = weylnorm(&["validate", s(&p)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 5, column 1"), "{}", stderr(&o));
    let p = write(dir.path(), "k.txt", "kind lattise\n");
    let o = weylnorm(&["markings", s(&p)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1, column 6"));
    assert_eq!(weylnorm(&["validate", "/nonexistent/file"]).status.code(), Some(2));
    assert_eq!(weylnorm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(weylnorm(&["selftest", "--level", "medium"]).status.code(), Some(2));
}

#[test]
fn invalid_marking_is_a_validation_failure() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "m.txt", "kind lattice\nrank 1\ngenerator\n-1\nmarking\nb 1\nbeta -1\n");
    let o = weylnorm(&["validate", s(&p)]);
    assert_eq!(o.status.code(), Some(1), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("FAIL markings"));
}

#[test]
fn rank_one_splitting_verdicts() {
    let dir = TempDir::new().unwrap();
    let su2 = weylnorm(&["build-nt", "--split-check", s(&export(dir.path(), "SU(2)", false))]);
    assert!(stdout(&su2).contains("split check: nonsplit"), "{}", stdout(&su2));
    assert!(stdout(&su2).contains("nu(s1, s1) = (1/2)"));
    let so3 = weylnorm(&["build-nt", "--split-check", s(&export(dir.path(), "SO(3)", false))]);
    assert!(stdout(&so3).contains("split check: split\n"), "{}", stdout(&so3));
    let o = weylnorm(&["--json", "build-nt", "--split-check", s(&export(dir.path(), "SO(3)", false))]);
    let v = json(&o);
    assert_eq!(v["split"]["verdict"], "split");
    assert_eq!(v["split"]["report"]["witness_verified"], true);
}

#[test]
fn g2_presentation_check() {
    let dir = TempDir::new().unwrap();
    let o = weylnorm(&["build-nt", "--presentation-check", s(&export(dir.path(), "G2", false))]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("presentation check: pass"), "{out}");
    assert!(out.contains("m12 = 6: holds"), "{out}");
    let v = json(&weylnorm(&["--json", "build-nt", "--presentation-check", s(&export(dir.path(), "G2", false))]));
    assert_eq!(v["presentation"]["braids"][0]["m"], 6);
}

#[test]
fn torus_marking_documents() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "t.txt", "kind torus-marking\nname SU(2)\nrank 1\ngenerator\n-1\ntorus\n-1\nh 1/2\n");
    let o = weylnorm(&["validate", s(&p)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = weylnorm(&["build-nt", "--split-check", s(&p)]);
    assert!(stdout(&o).contains("nonsplit"));
}

#[test]
fn subgroup_documents() {
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(export(dir.path(), "G2", false)).unwrap().replacen("kind lattice", "kind subgroup", 1);
    // The subgroup generated by -I.
    let p = write(dir.path(), "s.txt", &format!("{text}subgroup-generator\n-1 0\n0 -1\n"));
    let o = weylnorm(&["validate", s(&p)]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("subgroup: order 2, index 6"), "{}", stdout(&o));
    let p = write(dir.path(), "n.txt", &format!("{text}subgroup-generator\n2 0\n0 1\n"));
    let o = weylnorm(&["validate", s(&p)]);
    assert_eq!(o.status.code(), Some(1), "{}{}", stdout(&o), stderr(&o));
}

fn tags(v: &Value) -> Vec<String> {
    let mut t: Vec<String> = v["factors"].as_array().unwrap().iter().map(|f| f["tag"].as_str().unwrap().to_string()).collect();
    t.sort();
    t
}

#[test]
fn classify_two_adic_documents() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "f.txt", "kind two-adic\nprecision 12\nblock di4\nblock catalog Spin(5)\n");
    let v = json(&weylnorm(&["--json", "classify2adic", s(&p)]));
    assert_eq!(tags(&v), ["Coxeter(B2)", "DI4"]);
    let v = json(&weylnorm(&["--json", "classify2adic", "--precision", "8", s(&export(dir.path(), "SU(4)", false))]));
    assert_eq!(tags(&v), ["Coxeter(A3)"]);
    let p = write(dir.path(), "e.txt", "kind two-adic\nrank 0\n");
    let o = weylnorm(&["--json", "classify2adic", s(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)["factors"].as_array().unwrap().is_empty());
    // More than the frozen fixture holds.
    let p = write(dir.path(), "d.txt", "kind two-adic\nblock di4\n");
    let o = weylnorm(&["classify2adic", "--precision", "50", s(&p)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("insufficient 2-adic precision"), "{}", stderr(&o));
}

#[test]
fn compare_reports() {
    let dir = TempDir::new().unwrap();
    let o = weylnorm(&["compare", s(&export(dir.path(), "SU(2)", false)), s(&export(dir.path(), "SO(3)", false))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("dual: true"));
    let o = weylnorm(&["compare", s(&export(dir.path(), "G2", false)), s(&export(dir.path(), "G2", true))]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn markings_listing() {
    let dir = TempDir::new().unwrap();
    let v = json(&weylnorm(&["--json", "markings", s(&export(dir.path(), "Spin(5)", false))]));
    assert_eq!(v["reflections"].as_array().unwrap().len(), 4);
    assert_eq!(v["classes"], 2);
    assert_eq!(v["root_systems"], 2);
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let g2 = export(dir.path(), "G2", false);
    for args in [
        vec!["--json", "validate", s(&g2)],
        vec!["build-nt", "--split-check", "--presentation-check", "--table", s(&g2)],
        vec!["--json", "catalog", "list"],
    ] {
        assert_eq!(weylnorm(&args).stdout, weylnorm(&args).stdout, "{args:?}");
    }
}

#[test]
fn di4_fixture_matches_oracle() {
    let o = weylnorm(&["di4-fixture", "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn selftest_quick() {
    let o = weylnorm(&["selftest", "--level", "quick"]);
    let out = stdout(&o);
    // Criterion 6 fails on a correct build: the U(2) class is split.
    let failing: Vec<&str> = out.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failing.len(), 1, "{out}");
    assert!(failing[0].starts_with("FAIL criterion  6"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn selftest_names_corrupted_fixture() {
    let dir = TempDir::new().unwrap();
    let fixture = stdout(&weylnorm(&["di4-fixture"]));
    let lines: Vec<String> = fixture
        .lines()
        .map(|l| if l == "-2 335841304486 91987714319" { "0 335841304486 91987714319".to_string() } else { l.to_string() })
        .collect();
    assert_ne!(lines.join("\n") + "\n", fixture);
    write(dir.path(), "di4.txt", &(lines.join("\n") + "\n"));
    let o = Command::new(env!("CARGO_BIN_EXE_weylnorm"))
        .args(["selftest", "--level", "quick"])
        .env("WEYLNORM_FIXTURES", dir.path())
        .output()
        .unwrap();
    assert_ne!(o.status.code(), Some(0));
    let out = stdout(&o);
    let line = out.lines().find(|l| l.contains("criterion 11")).unwrap();
    assert!(line.starts_with("FAIL") && line.contains("DI4 invariant failed: group order 336"), "{line}");
}
