use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn focn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_focn"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn focn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn encyclopedia() -> TempDir {
    let dir = TempDir::new().unwrap();
    let o = focn(dir.path(), &["gen", "--out-prefix", "enc", "encyclopedia"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    dir
}

const LEARN: &[&str] = &[
    "learn", "--structure", "enc.struct", "--train", "enc.train", "--k", "2", "--r", "1", "--w", "1",
];

#[test]
fn learn_writes_hypothesis_and_manifest() {
    let dir = encyclopedia();
    let o = focn(dir.path(), &[LEARN, &["--out", "h.hyp"]].concat());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("training errors 0 of 5"), "{out}");
    assert!(out.contains("access queries"));
    assert!(dir.path().join("h.hyp").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("h.hyp.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "learn");
    assert_eq!(manifest["seed"], 0);
    assert!(manifest["inputs"]["enc.struct"].is_string());
    assert!(manifest["outputs"]["h.hyp"].is_string());
    assert!(manifest["access"]["tuple_queries"].as_u64().unwrap() > 0);
}

#[test]
fn contradictory_training_rejects() {
    let dir = encyclopedia();
    fs::write(dir.path().join("bad.train"), "1 2 1\n1 2 0\n").unwrap();
    let o = focn(
        dir.path(),
        &["learn", "--structure", "enc.struct", "--train", "bad.train", "--k", "2", "--r", "1", "--w", "1", "--out", "b.hyp"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("Reject"));
    assert!(!dir.path().join("b.hyp").exists());
}

#[test]
fn minerr_accepts_contradictory_training() {
    let dir = encyclopedia();
    fs::write(dir.path().join("bad.train"), "1 2 1\n1 2 0\n").unwrap();
    let o = focn(
        dir.path(),
        &[
            "learn", "--structure", "enc.struct", "--train", "bad.train", "--k", "2", "--r", "1", "--w", "1",
            "--mode", "minerr", "--out", "b.hyp",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("training errors 1 of 2"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = encyclopedia();
    assert_eq!(focn(dir.path(), &["learn", "--bogus"]).status.code(), Some(2));
    assert_eq!(focn(dir.path(), &["frobnicate"]).status.code(), Some(2));
    // wrong arity in the training file
    let o = focn(
        dir.path(),
        &["learn", "--structure", "enc.struct", "--train", "enc.train", "--k", "1", "--r", "1", "--w", "1", "--out", "x"],
    );
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with("error:"), "{err}");
    assert!(!err.contains("panicked"));
    let o = focn(dir.path(), &["stats", "--structure", "missing.struct"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stats_on_encyclopedia() {
    let dir = encyclopedia();
    let o = focn(dir.path(), &["stats", "--structure", "enc.struct", "--r", "2", "--w", "1", "--ell", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("n 8\n"), "{out}");
    assert!(out.contains("max degree 4\n"));
    assert!(out.contains("relation L arity 2 tuples 12\n"));
    assert!(out.contains("relation C arity 1 tuples 2\n"));
    assert!(out.contains("radius 8 "));
    assert!(out.contains("search radius 17 "));
}

#[test]
fn learn_is_byte_reproducible() {
    let dir = encyclopedia();
    let a = focn(dir.path(), &[LEARN, &["--out", "a.hyp"]].concat());
    let b = focn(dir.path(), &[LEARN, &["--out", "b.hyp", "--jobs", "4"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let ha = fs::read(dir.path().join("a.hyp")).unwrap();
    let hb = fs::read(dir.path().join("b.hyp")).unwrap();
    assert_eq!(ha, hb);
    let strip = |s: String| s.lines().filter(|l| !l.starts_with("hypothesis written")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(stdout(&a)), strip(stdout(&b)));
}

#[test]
fn eval_reproduces_training_labels() {
    let dir = encyclopedia();
    assert_eq!(focn(dir.path(), &[LEARN, &["--out", "h.hyp"]].concat()).status.code(), Some(0));
    let train = fs::read_to_string(dir.path().join("enc.train")).unwrap();
    let mut tuples = String::new();
    let mut labels = String::new();
    for line in train.lines().filter(|l| !l.trim().is_empty()) {
        let parts: Vec<_> = line.split_whitespace().collect();
        tuples += &format!("{} {}\n", parts[0], parts[1]);
        labels += &format!("{}\n", parts[2]);
    }
    fs::write(dir.path().join("tup"), tuples).unwrap();
    let o = focn(dir.path(), &["eval", "--structure", "enc.struct", "--hypothesis", "h.hyp", "--tuples", "tup"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), labels);
}

#[test]
fn check_formula_and_term() {
    let dir = encyclopedia();
    let phi = fs::read_to_string(dir.path().join("enc.formula")).unwrap();
    let phi = phi.lines().next().unwrap().trim_start_matches("phi: ").to_string();
    for (c, p, want) in [("1", "2", "1\n"), ("1", "8", "1\n"), ("1", "5", "0\n"), ("8", "2", "0\n")] {
        let assign = format!("c={c},p={p}");
        let o = focn(dir.path(), &["check", "--structure", "enc.struct", "--formula", &phi, "--assign", &assign]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout(&o), want, "c={c} p={p}");
    }
    let o = focn(dir.path(), &["check", "--structure", "enc.struct", "--formula", "#(y).(L(c,y))", "--assign", "c=8"]);
    assert_eq!(stdout(&o), "4\n");
    let o = focn(
        dir.path(),
        &["check", "--structure", "enc.struct", "--formula", "#(y).(L(c,y)) >= kappa", "--assign", "c=2", "--nassign", "kappa=3"],
    );
    assert_eq!(stdout(&o), "1\n");
    let o = focn(dir.path(), &["check", "--structure", "enc.struct", "--formula", "L(c,", "--assign", "c=2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_agrees_with_oracle() {
    let dir = encyclopedia();
    let o = focn(
        dir.path(),
        &["verify", "--structure", "enc.struct", "--train", "enc.train", "--k", "2", "--r", "1", "--w", "1", "--bounded-degree", "4"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("agreement\n"));
}

#[test]
fn gen_kinds_write_files() {
    let dir = TempDir::new().unwrap();
    let o = focn(dir.path(), &["gen", "--out-prefix", "t2", "thm2", "--t", "2", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    for f in ["t2.struct", "t2.T1.train", "t2.T2.train", "t2.formula", "t2.facts", "t2.manifest.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let o = focn(dir.path(), &["gen", "--out-prefix", "g", "--seed", "5", "eth", "--n", "8", "--q", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("g.train").exists());
    let o = focn(dir.path(), &["gen", "--out-prefix", "r", "--seed", "5", "random", "--n", "12", "--max-degree", "3", "--edges", "15"]);
    assert_eq!(o.status.code(), Some(0));
    let first = fs::read(dir.path().join("r.struct")).unwrap();
    focn(dir.path(), &["gen", "--out-prefix", "r", "--seed", "5", "random", "--n", "12", "--max-degree", "3", "--edges", "15"]);
    assert_eq!(first, fs::read(dir.path().join("r.struct")).unwrap());
    let o = focn(dir.path(), &["stats", "--structure", "r.struct"]);
    let out = stdout(&o);
    let degree: usize = out.lines().find_map(|l| l.strip_prefix("max degree ")).unwrap().parse().unwrap();
    assert!(degree <= 3);
}

#[test]
fn pac_smoke() {
    let dir = encyclopedia();
    fs::write(dir.path().join("d.dist"), "1 2 1 1/4\n1 8 1 1/4\n1 5 0 1/4\n8 2 0 1/4\n").unwrap();
    let args = [
        "pac", "--structure", "enc.struct", "--dist", "d.dist", "--k", "2", "--r", "1", "--w", "1", "--eps", "0.2",
        "--delta", "0.2", "--trials", "10", "--seed", "7",
    ];
    let a = focn(dir.path(), &args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(stdout(&a).contains("success frequency 1.0000"));
    let b = focn(dir.path(), &args);
    assert_eq!(stdout(&a), stdout(&b));
    fs::write(dir.path().join("bad.dist"), "1 2 1 1/2\n").unwrap();
    let o = focn(dir.path(), &["pac", "--structure", "enc.struct", "--dist", "bad.dist", "--k", "2", "--r", "1", "--w", "1"]);
    assert_eq!(o.status.code(), Some(2));
}
