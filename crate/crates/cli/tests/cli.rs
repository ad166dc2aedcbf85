use std::path::Path;
use std::process::{Command, Output};

use intersub::isc::prove;
use intersub::lambda::{check_typing, TypingDerivation};
use intersub::{check_isc, IscDerivation, Sequent, Signature, Undeclared};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intersub"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(run(args).stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const BETA: &str = r"y:A |- (\x. x) y : A
(app [y:A |- (\x. x) y : A]
  (abs [y:A |- \x. x : A -> A] (var [y:A, x:A |- x : A]))
  (var [y:A |- y : A]))
";

#[test]
fn prove_exit_codes() {
    assert_eq!(code(&["sub", "prove", "Omega <= Omega -> Omega"]), 0);
    assert_eq!(code(&["sub", "prove", "X <= Y"]), 1);
    assert_eq!(code(&["sub", "prove", "(A -> B) /\\ (A -> C) <= A -> (B /\\ C)"]), 0);
    assert_eq!(code(&["sub", "prove", "Omega |- Omega * Omega"]), 1);
    assert_eq!(code(&["sub", "oracle", "X * Y /\\ X * Omega <= X * Y"]), 0);
    assert_eq!(code(&["sub", "oracle", "X <= Y"]), 1);
}

#[test]
fn parse_errors_exit_2_with_a_position() {
    let out = run(&["sub", "prove", "X <= (Y"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("input:1:8"), "{err}");
    assert!(err.contains('^'));
    assert_eq!(code(&["sub", "prove", "X <= Y <= Z"]), 2);
}

#[test]
fn signature_files_are_respected() {
    let dir = tempfile::tempdir().unwrap();
    let sig = write(
        dir.path(),
        "sig.txt",
        "Omega 0 0 0\narrow 1 1 0\nNat 0 0 1\nInt 0 0 1\nprec Nat <= Int\n",
    );
    assert_eq!(code(&["--sig", &sig, "sub", "prove", "Nat <= Int"]), 0);
    assert_eq!(code(&["--sig", &sig, "sub", "prove", "Int <= Nat"]), 1);
    // undeclared names are an input error once a signature is given
    assert_eq!(code(&["--sig", &sig, "sub", "prove", "Nat <= Bool"]), 2);
    let bad = write(dir.path(), "bad.txt", "Omega 0 0 7\n");
    assert_eq!(code(&["--sig", &bad, "sub", "prove", "Omega <= Omega"]), 2);
}

#[test]
fn emitted_derivations_reparse_and_check() {
    let sig = Signature::arrow_product([]);
    for input in [
        "(A -> B) /\\ (A -> C) <= A -> (B /\\ C)",
        "X * Y, Z |- X * Omega",
        "Omega <= Omega -> Omega",
    ] {
        for compact in [false, true] {
            let mut args = vec!["sub", "prove", input, "--emit"];
            if compact {
                args.insert(0, "--compact");
            }
            let text = stdout(&args);
            let body = if compact {
                text.as_str()
            } else {
                text.split_once('\n').unwrap().1
            };
            let mut s = sig.clone();
            let d = IscDerivation::from_text(body, &mut s, Undeclared::DeclareAtoms).unwrap();
            check_isc(&d, &s).unwrap();
            let want = Sequent::parse_with(input, &mut s, Undeclared::DeclareAtoms).unwrap();
            assert_eq!(d.conclusion(), &want);
            assert_eq!(prove(&want, &s).unwrap().as_ref(), Some(&d));
        }
    }
}

#[test]
fn translation_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let isc = stdout(&["--compact", "sub", "prove", "(X * Y) /\\ Z <= X * Y", "--emit"]);
    let f = write(dir.path(), "d.txt", &isc);
    let ax = stdout(&["--compact", "sub", "translate", "--dir", "isc2ax", "--in", &f]);
    let g = write(dir.path(), "a.txt", &ax);
    let back = stdout(&["--compact", "sub", "translate", "--dir", "ax2isc", "--in", &g]);
    assert_eq!(back.trim(), isc.trim());
    let wrong = write(dir.path(), "w.txt", "(refl [X <= Y])");
    assert_eq!(code(&["sub", "translate", "--dir", "ax2isc", "--in", &wrong]), 1);
    let junk = write(dir.path(), "j.txt", "(refl [X <=");
    assert_eq!(code(&["sub", "translate", "--dir", "ax2isc", "--in", &junk]), 2);
}

#[test]
fn inversion_output() {
    let out = stdout(&["invert", "--head", "arrow", "(X -> Y) /\\ (Y -> X) <= X -> Y"]);
    assert!(out.starts_with("selected: 0\n"), "{out}");
    let out = stdout(&["--compact", "invert", "--head", "prod", "X * Y /\\ Omega * Y <= X * Y"]);
    assert_eq!(out.lines().count(), 3, "{out}");
    assert_eq!(code(&["invert", "--head", "arrow", "X -> Y <= Y -> Y"]), 1);
    assert_eq!(code(&["invert", "--head", "prod", "X -> Y <= X -> Y"]), 2);
}

#[test]
fn type_check_reduce_expand() {
    let dir = tempfile::tempdir().unwrap();
    let j = write(dir.path(), "j.txt", BETA);
    assert_eq!(
        stdout(&["type", "check", "--in", &j]).trim(),
        r"ok: y:A |- (\x. x) y : A"
    );

    let reduced = stdout(&[
        "--compact",
        "reduce",
        "--check-preservation",
        "--in",
        &j,
        "--path",
        "root",
    ]);
    let mut sig = Signature::arrow_product(["A"]);
    let r = TypingDerivation::from_text(&reduced, &mut sig, Undeclared::Reject).unwrap();
    check_typing(&r, &sig).unwrap();
    assert_eq!(r.judgement().to_string(), "y:A |- y : A");
    let rf = write(dir.path(), "r.txt", &reduced);

    let e = stdout(&["--compact", "expand", "--in", &rf, "--redex", r"(\z. z) y"]);
    let e = TypingDerivation::from_text(&e, &mut sig, Undeclared::Reject).unwrap();
    check_typing(&e, &sig).unwrap();
    assert_eq!(e.judgement().to_string(), r"y:A |- (\z. z) y : A");

    let p = stdout(&["--compact", "expand", "--in", &rf, "--kind", "proj2"]);
    let p = TypingDerivation::from_text(&p, &mut sig, Undeclared::Reject).unwrap();
    check_typing(&p, &sig).unwrap();
    assert_eq!(p.judgement().to_string(), r"y:A |- snd <\z. z, y> : A");

    // redex that does not contract to the subterm, and a non-redex path
    assert_eq!(code(&["expand", "--in", &rf, "--redex", r"(\z. z z) y"]), 2);
    assert_eq!(code(&["reduce", "--in", &rf]), 2);
    assert_eq!(code(&["reduce", "--in", &j, "--path", "0"]), 2);

    let wrong = write(dir.path(), "bad.txt", &BETA.replacen(": A\n", ": B\n", 1));
    assert_eq!(code(&["type", "check", "--in", &wrong]), 1);
    let bad_rule = write(dir.path(), "bad2.txt", &BETA.replace("x : A])", "x : B])"));
    assert_eq!(code(&["type", "check", "--in", &bad_rule]), 1);
}

#[test]
fn difftest_command() {
    let out = run(&["difftest", "--seed", "2", "--size", "3", "--cases", "15"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("all properties hold"));
    let json = stdout(&["difftest", "--cases", "10", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["properties"].as_array().unwrap().len(), 7);
    assert_eq!(code(&["difftest", "--cases", "60", "--mutant", "skip-width"]), 1);
}
