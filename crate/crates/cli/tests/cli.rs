use std::path::Path;
use std::process::{Command, Output};

const RUNNING: &str = "[field]\na = 1\nmodulus = t + 1\n\n[family]\ngenus = 1\nH = X\nQf = X^2 + (1+G)*X + 1\nh = X\n";
const NONCONST_R: &str = "[field]\na = 1\n\n[family]\ngenus = 1\nH = X + G\nQf = X^2 + X + 1\nh = X + G\n";

fn famzeta(dir: &Path, family: &str, args: &[&str]) -> Output {
    let path = dir.join("family.fam");
    std::fs::write(&path, family).unwrap();
    Command::new(env!("CARGO_BIN_EXE_famzeta")).arg(&path).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn running_family_at_zero() {
    let d = tempfile::tempdir().unwrap();
    let o = famzeta(d.path(), RUNNING, &["-n", "1", "-g", "0", "--verify-oracle"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "P: 1 -1 2\nzeta: P(T)/((1-T)(1-2*T))\ncounts: 2 8\noracle: PASS\n");
}

#[test]
fn batch_keeps_input_order() {
    let d = tempfile::tempdir().unwrap();
    let b = d.path().join("params.txt");
    std::fs::write(&b, "t\n# comment\nt^2\nt+1\n").unwrap();
    let o = famzeta(d.path(), RUNNING, &["-n", "3", "--batch", b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let gs: Vec<&str> = s.lines().filter(|l| l.starts_with("gamma:")).collect();
    assert_eq!(gs, ["gamma: t", "gamma: t^2", "gamma: t+1"]);
    assert_eq!(s.lines().filter(|l| l.starts_with("P:")).count(), 3);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    assert_eq!(famzeta(p, "[field]\na = 1\n", &["-g", "0"]).status.code(), Some(2));
    assert_eq!(famzeta(p, RUNNING, &["-g", "X"]).status.code(), Some(2));
    let low = format!("{RUNNING}\n[options]\nN2 = 10\n");
    assert_eq!(famzeta(p, &low, &["-g", "0"]).status.code(), Some(2));
    let bad = RUNNING.replace("genus = 1", "genus = 2");
    assert_eq!(famzeta(p, &bad, &["-g", "0"]).status.code(), Some(3));
    // r = G^2 + G + 1 vanishes at the primitive elements of F_4
    assert_eq!(famzeta(p, NONCONST_R, &["-n", "2", "-g", "t"]).status.code(), Some(4));
    assert_eq!(famzeta(p, RUNNING, &["-n", "2", "-g", "1"]).status.code(), Some(4));
}

#[test]
fn save_load_and_determinism() {
    let d = tempfile::tempdir().unwrap();
    let f = d.path().join("ff.txt");
    let fs = f.to_str().unwrap();
    let a = famzeta(d.path(), NONCONST_R, &["-n", "3", "-g", "t", "--save-family-frobenius", fs]);
    let b = famzeta(d.path(), NONCONST_R, &["-n", "3", "-g", "t"]);
    let c = famzeta(d.path(), NONCONST_R, &["-n", "3", "-g", "t", "--load-family-frobenius", fs]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let text = std::fs::read_to_string(&f).unwrap();
    assert!(text.starts_with("famzeta family frobenius v1\ng 1\na 1\nkappa "));
    let other = famzeta(d.path(), NONCONST_R, &["-n", "2", "-g", "t+1", "--load-family-frobenius", fs]);
    assert_eq!(other.status.code(), Some(2));
}

#[test]
fn dumps_are_labeled() {
    let d = tempfile::tempdir().unwrap();
    let o = famzeta(d.path(), RUNNING, &["-n", "1", "-g", "0", "--dump-precision", "--dump-frobenius"]);
    let s = stdout(&o);
    assert!(s.contains("[precision]\nN_f = 3\n"));
    assert!(s.contains("[frobenius]\nF(0):"));
    assert!(s.contains("P: 1 -1 2"));
}
