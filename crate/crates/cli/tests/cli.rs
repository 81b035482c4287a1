use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(file)
}

fn mumall(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mumall")).args(args).env_remove("MUMALL_FUEL").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn arith() -> String {
    corpus("arith.mumall").display().to_string()
}

#[test]
fn check_exit_codes() {
    let ok = mumall(&["check", corpus("plus_totality.mumall").to_str().unwrap(), "--mode", "core"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));

    // the induction proof needs an invariant outside P1
    let sigma1 = mumall(&["check", corpus("peano.mumall").to_str().unwrap(), "--sigma1"]);
    assert_eq!(sigma1.status.code(), Some(1));
    assert!(stdout(&sigma1).contains("induction: FAIL"));

    // the admissible-rule proof of 2 + 2 uses unfold
    let core = mumall(&["check", &arith(), "--mode", "core"]);
    assert_eq!(core.status.code(), Some(1));
    assert!(stdout(&core).contains("plus22_check: ok"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mumall");
    fs::write(&bad, "theorem t : 1\nproof t [core] { one").unwrap();
    assert_eq!(mumall(&["check", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(mumall(&["check", dir.path().join("missing").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn unknown_flags_are_usage_errors() {
    let o = mumall(&["check", &arith(), "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(mumall(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mumall(&["compute", &arith(), "--query", "plus22", "--strategy", "bfs"]).status.code(), Some(2));
}

#[test]
fn compute_prints_values() {
    for (q, v) in [("plus22", "4"), ("plus35", "8"), ("mult34", "12"), ("mult00", "0"), ("ack23", "9")] {
        let o = mumall(&["compute", &arith(), "--query", q]);
        assert_eq!(o.status.code(), Some(0), "{q}");
        assert_eq!(stdout(&o).trim(), v, "{q}");
    }
    let o = mumall(&["compute", &arith(), "--query", "ack33", "--fuel", "50"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "EXHAUSTED");
}

#[test]
fn fuel_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_mumall"))
        .args(["compute", &arith(), "--query", "ack33"])
        .env("MUMALL_FUEL", "50")
        .output()
        .unwrap();
    assert_eq!(stdout(&o).trim(), "EXHAUSTED");
    // an explicit flag wins
    let o = Command::new(env!("CARGO_BIN_EXE_mumall"))
        .args(["compute", &arith(), "--query", "plus22", "--fuel", "10000"])
        .env("MUMALL_FUEL", "1")
        .output()
        .unwrap();
    assert_eq!(stdout(&o).trim(), "4");
}

#[test]
fn random_strategy_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut traces = Vec::new();
    for k in 0..2 {
        let t = dir.path().join(format!("t{k}"));
        let o = mumall(&["compute", &arith(), "--query", "mult34", "--strategy", "random:11", "--trace", t.to_str().unwrap()]);
        assert_eq!(stdout(&o).trim(), "12");
        traces.push(fs::read_to_string(t).unwrap());
    }
    assert_eq!(traces[0], traces[1]);
    assert!(traces[0].lines().count() > 10);
}

#[test]
fn certificates_check_when_appended_to_the_source() {
    let o = mumall(&["compute", &arith(), "--query", "plus22", "--certify"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("4"));
    let script: String = lines.map(|l| format!("{l}\n")).collect();
    assert!(script.contains("# certificate accepted"));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("with_cert.mumall");
    fs::write(&file, fs::read_to_string(corpus("arith.mumall")).unwrap() + "\n" + &script).unwrap();
    let c = mumall(&["check", file.to_str().unwrap(), "--mode", "core"]);
    assert!(stdout(&c).contains("plus22_certificate: ok [core]"), "{}", stdout(&c));
}

#[test]
fn classify_examples() {
    for (name, class) in [("eq-or-neq-par", "N2"), ("eq_or_neq_plus", "N3"), ("nat", "P1"), ("ack", "P1")] {
        let o = mumall(&["classify", &arith(), "--formula", name]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert_eq!(stdout(&o).trim(), class, "{name}");
    }
}

#[test]
fn transforms() {
    let dual = mumall(&["dual", "--expr", "ex x. x = z * 1"]);
    assert_eq!(stdout(&dual).trim(), "all x. x != z | bot");
    let back = mumall(&["dual", "--expr", stdout(&dual).trim()]);
    assert_eq!(stdout(&back).trim(), "ex x. x = z * 1");

    let pos = mumall(&["polarize", "--expr", "all x. x = z \\/ x != z", "--pol", "1"]);
    assert_eq!(stdout(&pos).trim(), "all x. x = z + x != z");
    let neg = mumall(&["polarize", "--expr", "all x. x = z \\/ x != z", "--pol", "0"]);
    assert_eq!(stdout(&neg).trim(), "all x. x = z | x != z");
    assert_eq!(mumall(&["polarize", "--expr", "all x. x = z \\/ x != z", "--pol", "01"]).status.code(), Some(2));

    let dep = mumall(&["depolarize", "--expr", "all x. x = z + x != z"]);
    assert_eq!(stdout(&dep).trim(), "all x. x = z \\/ x != z");

    let exp = mumall(&["expand-exp", "--expr", "? (a = z)"]);
    assert!(stdout(&exp).starts_with("mu "), "{}", stdout(&exp));
    assert!(!stdout(&exp).contains('?'));
}

#[test]
fn eval_labels() {
    let peano = corpus("peano.mumall");
    let o = mumall(&["eval", peano.to_str().unwrap(), "--formula", "succ_not_zero", "--fuel", "20", "--qbound", "5"]);
    assert_eq!(stdout(&o).trim(), "True");
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.mumall");
    let prelude = fs::read_to_string(corpus("prelude.mumall")).unwrap();
    fs::write(&f, prelude + "theorem wrong : ex x. s x = z\ntheorem open : all x. nat x\n").unwrap();
    let o = mumall(&["eval", f.to_str().unwrap(), "--formula", "wrong", "--fuel", "5", "--qbound", "4"]);
    assert_eq!(stdout(&o).trim(), "False");
    let o = mumall(&["eval", f.to_str().unwrap(), "--formula", "open", "--fuel", "5", "--qbound", "4"]);
    assert_eq!(stdout(&o).trim(), "Unknown");
}

#[test]
fn corpus_is_sorted_and_reported() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let o = mumall(&["corpus", "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let names: Vec<String> =
        stdout(&o).lines().filter(|l| l.contains(": ok")).map(|l| l.split(':').next().unwrap().to_string()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(names.len() >= 9);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(report["sweep"]["false_count"], 0);
    assert_eq!(report["proofs"].as_array().unwrap().len(), names.len());
}
