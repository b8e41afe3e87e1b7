use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Runs the binary from inside `dir` so relative paths match the golden files.
fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabrel"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_in(&fixtures(), args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn golden_outputs() {
    let cases: &[(&str, &[&str])] = &[
        ("eval_worked_example", &["eval", "worked_example.diag"]),
        ("eval_worked_example_affine", &["eval", "worked_example_affine.diag"]),
        ("eval_worked_example_basis", &["eval", "worked_example.diag", "--print", "basis"]),
        ("eval_identity", &["eval", "identity.diag"]),
        ("eval_empty", &["eval", "empty.diag"]),
        ("dilate_repetition3", &["dilate", "repetition3.subspace"]),
        ("demo_teleport_p5", &["demo", "teleport", "--p", "5"]),
        ("demo_repetition3", &["demo", "repetition3"]),
        ("verify_weight1", &["verify", "repetition3.code", "repetition3.table", "repetition3_weight1.errors"]),
    ];
    for (name, args) in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout(&o), golden(name), "{name}");
    }
}

#[test]
fn documented_lines() {
    let o = run(&["eval", "worked_example.diag"]);
    assert_eq!(stdout(&o), "a1 = a2 = b1\na1 + a3 = b2 + b3\n");
    let o = run(&["demo", "teleport", "--p", "5"]);
    assert!(stdout(&o).contains("IDENTITY: yes\n"));
    let o = run(&["demo", "repetition3"]);
    let text = stdout(&o);
    for row in ["(1,0,0)->(1,1)", "(0,1,0)->(1,0)", "(0,0,1)->(0,1)", "CORRECTS weight<=1 X: yes"] {
        assert!(text.contains(row), "missing {row}");
    }
    assert_eq!(stdout(&run(&["classify", "zero.subspace"])), "isotropic\n");
}

#[test]
fn teleportation_at_each_prime() {
    for p in ["2", "3", "5", "7"] {
        let o = run(&["demo", "teleport", "--p", p]);
        assert_eq!(o.status.code(), Some(0), "p={p}");
    }
}

#[test]
fn boolean_exit_codes() {
    let eq = run(&["equal", "fourier_euler.diag", "fourier_direct.diag"]);
    assert_eq!((eq.status.code(), stdout(&eq).as_str()), (Some(0), "EQUAL: yes\n"));
    let same = run(&["equal", "teleportation.diag", "teleportation.diag"]);
    assert_eq!(same.status.code(), Some(0));
    let fwd = run(&["subset", "identity_quantum.diag", "decohered_identity.diag"]);
    assert_eq!(fwd.status.code(), Some(0));
    let back = run(&["subset", "decohered_identity.diag", "identity_quantum.diag"]);
    assert_eq!((back.status.code(), stdout(&back).as_str()), (Some(1), "SUBSET: no\n"));
    let no = run(&["equal", "identity_quantum.diag", "decohered_identity.diag"]);
    assert_eq!(no.status.code(), Some(1));
    let v = run(&["verify", "repetition3.code", "repetition3.table", "repetition3_weight2.errors"]);
    assert_eq!(v.status.code(), Some(1));
    assert!(stdout(&v).ends_with("CORRECTS: no\n"));
}

#[test]
fn input_and_usage_errors() {
    // Missing file, bad prime, shape mismatch and parse errors are input errors.
    assert_eq!(run(&["eval", "missing.diag"]).status.code(), Some(3));
    assert_eq!(run(&["--p", "9", "eval", "identity.diag"]).status.code(), Some(3));
    assert_eq!(run(&["equal", "identity.diag", "worked_example.diag"]).status.code(), Some(3));
    assert_eq!(run(&["equal", "identity.diag", "identity_quantum.diag"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.diag"), "p=3; layer=affine\nnode 0 z_spider phase=7\n").unwrap();
    let o = run_in(dir.path(), &["eval", "bad.diag"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "identity.diag", "--print", "pictures"]).status.code(), Some(2));
}

#[test]
fn syndrome_and_dilate() {
    let o = run(&["syndrome", "repetition3.code", "0 0 0 | 1 0 0"]);
    assert_eq!(stdout(&o), "(1,1)\nUNDETECTABLE: no\n");
    let o = run(&["syndrome", "repetition3.code", "0,0,0,1,1,1"]);
    assert_eq!(stdout(&o), "(0,0)\nUNDETECTABLE: yes\n");
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("encoder.diag");
    let o = run(&["dilate", "repetition3.subspace", "--out", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    // The written encoder evaluates to the printed equations.
    let printed: Vec<String> = stdout(&o)
        .lines()
        .skip_while(|l| *l != "encoder:")
        .skip(1)
        .take_while(|l| l.starts_with("  "))
        .map(|l| l.trim().to_string())
        .collect();
    let evaluated = stdout(&run(&["eval", target.to_str().unwrap()]));
    assert_eq!(evaluated.lines().collect::<Vec<_>>(), printed);
    assert_eq!(run(&["dilate", "zero.subspace"]).status.code(), Some(3));
}

fn copy_fixtures() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(fixtures()).unwrap() {
        let entry = entry.unwrap();
        if entry.file_type().unwrap().is_file() {
            std::fs::copy(entry.path(), dir.path().join(entry.file_name())).unwrap();
        }
    }
    dir
}

#[test]
fn mutated_fixtures_flip_demo_verdicts() {
    let dir = copy_fixtures();
    let fx = dir.path().to_str().unwrap();
    assert_eq!(run(&["--fixtures-dir", fx, "demo", "repetition3"]).status.code(), Some(0));
    assert_eq!(run(&["--fixtures-dir", fx, "demo", "teleport", "--p", "3"]).status.code(), Some(0));

    // A decoder that corrects the wrong qubit.
    let table = dir.path().join("repetition3.table");
    let text = std::fs::read_to_string(&table).unwrap();
    std::fs::write(&table, text.replace("0 1 -> 0 0 0 | 0 0 1", "0 1 -> 0 0 0 | 0 1 0")).unwrap();
    let o = run(&["--fixtures-dir", fx, "demo", "repetition3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("CORRECTS weight<=1 X: no"));

    // A different code: Z1 Z3 replaced by Z3. (Z2 Z3 would span the same code.)
    std::fs::write(&table, text).unwrap();
    let code = dir.path().join("repetition3.code");
    let text = std::fs::read_to_string(&code).unwrap();
    std::fs::write(&code, text.replace("1 0 1 | 0 0 0", "0 0 1 | 0 0 0")).unwrap();
    let o = run(&["--fixtures-dir", fx, "demo", "repetition3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("SYNDROME TABLE: differs"));

    // Corrections driven by the wrong outcomes.
    let tele = dir.path().join("teleportation.diag");
    let text = std::fs::read_to_string(&tele).unwrap();
    let mutated = text
        .replace("wire n4.out0 n5.in0", "wire n4.out0 n7.in0")
        .replace("wire n3.out0 n7.in0", "wire n3.out0 n5.in0");
    assert_ne!(mutated, text);
    std::fs::write(&tele, mutated).unwrap();
    let o = run(&["--fixtures-dir", fx, "demo", "teleport", "--p", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("IDENTITY: no"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["eval", "teleportation_boxed.diag", "--print", "basis"][..],
        &["demo", "repetition3"][..],
        &["dilate", "repetition3.subspace"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.status.code(), b.status.code());
    }
}
