use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ombench_core::import::export_json;
use ombench_core::{ClassRecord, MappingSet, OntologySnapshot, Relation, OWL_THING, RDFS_LABEL};
use serde_json::Value;

fn ombench(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ombench"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn refs_file(dir: &Path, n: usize) -> PathBuf {
    let refs = MappingSet::from_pairs(
        Relation::Equivalence,
        (0..n).map(|i| (format!("http://s/{i:03}"), format!("http://t/{i:03}"))),
    );
    let path = dir.join("refs.tsv");
    fs::write(&path, refs.to_tsv()).unwrap();
    path
}

/// A 150-class target: 15 groups of 10 siblings with shared label words.
fn big_target(dir: &Path) -> PathBuf {
    let mut records = Vec::new();
    for g in 0..15 {
        let group = format!("http://t/g{g:02}");
        records.push(ClassRecord::new(group.clone()).with_label(RDFS_LABEL, format!("group {g} disease")));
        for k in 0..9 {
            records.push(
                ClassRecord::new(format!("http://t/{:03}", g * 9 + k))
                    .with_parent(group.clone())
                    .with_label(RDFS_LABEL, format!("type {k} disease of group {g}")),
            );
        }
    }
    let snap = OntologySnapshot::new("http://t", OWL_THING, records).unwrap();
    let path = dir.join("tgt.json");
    fs::write(&path, export_json(&snap)).unwrap();
    path
}

fn data_rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = ombench(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(ombench(dir.path(), &[]).status.code(), Some(1));
    assert_eq!(ombench(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(ombench(dir.path(), &["split", "--bogus-flag"]).status.code(), Some(1));
}

#[test]
fn semi_supervised_split_of_100() {
    let dir = tempfile::tempdir().unwrap();
    refs_file(dir.path(), 100);
    let out = ombench(
        dir.path(),
        &["split", "--refs", "refs.tsv", "--scheme", "semi", "--seed", "42", "--out-dir", "s"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = dir.path().join("s");
    assert_eq!(data_rows(&s.join("train.tsv")), 20);
    assert_eq!(data_rows(&s.join("val.tsv")), 10);
    assert_eq!(data_rows(&s.join("test.tsv")), 70);
    let manifest: Value = serde_json::from_slice(&fs::read(s.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 42);
    assert_eq!(manifest["config"]["scheme"], "semi_supervised");
    assert!(manifest["inputs"]["refs.tsv"].is_string());
    assert_eq!(manifest["outputs"].as_object().unwrap().len(), 3);
}

#[test]
fn unsupervised_split_writes_val_and_test() {
    let dir = tempfile::tempdir().unwrap();
    refs_file(dir.path(), 37);
    let out = ombench(dir.path(), &["split", "--refs", "refs.tsv", "--scheme", "unsup", "--out-dir", "u"]);
    assert!(out.status.success());
    assert_eq!(data_rows(&dir.path().join("u/val.tsv")), 4);
    assert_eq!(data_rows(&dir.path().join("u/test.tsv")), 33);
    assert!(!dir.path().join("u/train.tsv").exists());
}

#[test]
fn fifty_plus_fifty_negatives() {
    let dir = tempfile::tempdir().unwrap();
    big_target(dir.path());
    let refs = MappingSet::from_pairs(
        Relation::Equivalence,
        [(0, 3), (1, 17), (2, 40), (3, 99)].map(|(s, t)| (format!("http://s/{s}"), format!("http://t/{t:03}"))),
    );
    fs::write(dir.path().join("refs.tsv"), refs.to_tsv()).unwrap();
    let out = ombench(
        dir.path(),
        &[
            "sample-cands", "--refs", "refs.tsv", "--tgt-onto", "tgt.json", "--idf", "50",
            "--neighbour", "50", "--output", "cands.jsonl",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("cands.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 4);
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        let cands = v["candidates"].as_array().unwrap();
        assert_eq!(cands.len(), 100);
        assert!(!cands.contains(&v["tgt"]));
    }
    assert!(dir.path().join("cands.jsonl.manifest.json").exists());
}

#[test]
fn conflicting_strategy_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    big_target(dir.path());
    refs_file(dir.path(), 3);
    let base = ["sample-cands", "--refs", "refs.tsv", "--tgt-onto", "tgt.json", "--output", "c.jsonl"];
    let mixed: Vec<&str> = base.iter().copied().chain(["--idf", "2", "--strategy", "random:2"]).collect();
    assert_eq!(ombench(dir.path(), &mixed).status.code(), Some(1));
    assert_eq!(ombench(dir.path(), &base).status.code(), Some(1));
    let bad: Vec<&str> = base.iter().copied().chain(["--strategy", "psychic:3"]).collect();
    assert_eq!(ombench(dir.path(), &bad).status.code(), Some(1));
    let ordered: Vec<&str> = base.iter().copied().chain(["--strategy", "random:2", "--strategy", "idf:2"]).collect();
    assert_eq!(ombench(dir.path(), &ordered).status.code(), Some(0));
}

#[test]
fn data_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("broken.owl"), "<rdf:RDF><oops></rdf:RDF>").unwrap();
    let out = ombench(dir.path(), &["import", "--input", "broken.owl", "--output", "x.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    let missing = ombench(dir.path(), &["import", "--input", "nope.owl", "--output", "x.json"]);
    assert_eq!(missing.status.code(), Some(2));
    fs::write(dir.path().join("empty.tsv"), "SrcEntity\tTgtEntity\tScore\n").unwrap();
    let empty = ombench(dir.path(), &["split", "--refs", "empty.tsv", "--scheme", "semi", "--out-dir", "o"]);
    assert_eq!(empty.status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    refs_file(dir.path(), 20);
    fs::write(dir.path().join("cfg.json"), r#"{"seed": 7, "scheme": "semi"}"#).unwrap();
    let run = |args: &[&str]| {
        let mut all = vec!["split", "--refs", "refs.tsv", "--config", "cfg.json"];
        all.extend_from_slice(args);
        assert!(ombench(dir.path(), &all).status.success());
    };
    run(&["--out-dir", "a"]);
    run(&["--out-dir", "b", "--seed", "8", "--scheme", "unsup"]);
    let read = |d: &str| -> Value {
        serde_json::from_slice(&fs::read(dir.path().join(d).join("manifest.json")).unwrap()).unwrap()
    };
    assert_eq!(read("a")["seed"], 7);
    assert_eq!(read("a")["config"]["scheme"], "semi_supervised");
    assert_eq!(read("b")["seed"], 8);
    assert_eq!(read("b")["config"]["scheme"], "unsupervised");
    fs::write(dir.path().join("bad.json"), r#"{"sed": 1}"#).unwrap();
    let out = ombench(dir.path(), &["split", "--refs", "refs.tsv", "--config", "bad.json", "--out-dir", "c"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn evaluation_reports() {
    let dir = tempfile::tempdir().unwrap();
    let scored = [
        r#"{"src":"a","tgt":"t","candidates":["x","y","z"],"scores":[0.1,0.2,0.3],"tgt_score":0.9}"#,
        r#"{"src":"b","tgt":"t","candidates":["x","y","z"],"scores":[0.6,0.1,0.2],"tgt_score":0.5}"#,
        r#"{"src":"c","tgt":"t","candidates":["w","x","y","z"],"scores":[0.6,0.7,0.8,0.1],"tgt_score":0.5}"#,
    ];
    fs::write(dir.path().join("scored.jsonl"), scored.join("\n") + "\n").unwrap();
    let out = ombench(dir.path(), &["rank-eval", "--scored", "scored.jsonl", "--ks", "1,5", "--output", "r.json"]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    assert!((r["MRR"].as_f64().unwrap() - 7.0 / 12.0).abs() < 1e-12);
    assert_eq!(r["Hits"]["5"], 1.0);
    assert!(r["P"].is_null());

    let refs = MappingSet::from_pairs(Relation::Equivalence, (1..=10).map(|i| (format!("s{i}"), format!("t{i}"))));
    let test = MappingSet::from_pairs(Relation::Equivalence, (1..=7).map(|i| (format!("s{i}"), format!("t{i}"))));
    let pred = MappingSet::from_pairs(Relation::Equivalence, [("s1", "t1"), ("s2", "t2"), ("s8", "t8"), ("x", "y")]);
    fs::write(dir.path().join("refs.tsv"), refs.to_tsv()).unwrap();
    fs::write(dir.path().join("test.tsv"), test.to_tsv()).unwrap();
    fs::write(dir.path().join("pred.tsv"), pred.to_tsv()).unwrap();
    let out = ombench(
        dir.path(),
        &["match-eval", "--pred", "pred.tsv", "--refs", "refs.tsv", "--eval", "test.tsv", "--output", "m.json"],
    );
    assert!(out.status.success());
    let m: Value = serde_json::from_slice(&fs::read(dir.path().join("m.json")).unwrap()).unwrap();
    assert!((m["P"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert!((m["R"].as_f64().unwrap() - 2.0 / 7.0).abs() < 1e-12);

    let out = ombench(
        dir.path(),
        &["match-eval", "--task", "subs", "--pred", "pred.tsv", "--refs", "refs.tsv", "--output", "s.json"],
    );
    assert!(out.status.success());
    let s: Value = serde_json::from_slice(&fs::read(dir.path().join("s.json")).unwrap()).unwrap();
    assert!(s["R"].is_null() && s["F1"].is_null());
}

#[test]
fn editsim_commands_on_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for o in ["src", "tgt"] {
        let owl = fixture(&format!("{o}.owl"));
        assert!(ombench(d, &["import", "--input", &owl, "--output", &format!("{o}.json")]).status.success());
    }
    let exact = ombench(
        d,
        &["editsim-match", "--src-onto", "src.json", "--tgt-onto", "tgt.json", "--threshold", "1.0", "--output", "m.tsv"],
    );
    assert!(exact.status.success());
    let m = MappingSet::from_tsv(&fs::read_to_string(d.join("m.tsv")).unwrap(), Relation::Equivalence).unwrap();
    assert!(m.contains("http://example.org/src#S0006", "http://example.org/tgt#T0006"));
    assert!(m.iter().all(|x| x.score == Some(1.0)));
    let srcs: Vec<&str> = m.pairs().map(|(s, _)| s).collect();
    let uniq: std::collections::BTreeSet<&str> = srcs.iter().copied().collect();
    assert_eq!(srcs.len(), uniq.len());

    let none = ombench(
        d,
        &["editsim-match", "--src-onto", "src.json", "--tgt-onto", "tgt.json", "--threshold", "1.01", "--output", "n.tsv"],
    );
    assert!(none.status.success());
    assert_eq!(data_rows(&d.join("n.tsv")), 0);

    fs::write(
        d.join("c.jsonl"),
        "{\"src\":\"http://example.org/src#S0006\",\"tgt\":\"http://example.org/tgt#T0006\",\"candidates\":[\"http://example.org/tgt#T0007\"]}\n\
         {\"src\":\"http://example.org/src#S0006\",\"tgt\":\"http://nowhere\",\"candidates\":[]}\n",
    )
    .unwrap();
    let out = ombench(
        d,
        &["editsim-score", "--cands", "c.jsonl", "--src-onto", "src.json", "--tgt-onto", "tgt.json", "--output", "s.jsonl"],
    );
    assert!(out.status.success());
    let text = fs::read_to_string(d.join("s.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 1);
    let v: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(v["tgt_score"], 1.0);
}
