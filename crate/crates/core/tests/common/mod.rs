#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use ombench_core::{ClassRecord, OntologySnapshot, OWL_THING, RDFS_LABEL};
use rand::seq::SliceRandom;
use rand::Rng;

pub const WORDS: &[&str] = &[
    "heart", "lung", "skin", "acute", "chronic", "disease", "cancer", "cell", "type", "renal",
    "failure", "syndrome", "bone", "liver", "neoplasm", "benign",
];

pub fn iri(i: usize) -> String {
    format!("http://t.org/C{:03}", i)
}

/// Random DAG: each class may pick parents among lower-numbered classes.
pub fn random_dag<R: Rng>(rng: &mut R, n: usize, max_parents: usize, labelled: bool) -> OntologySnapshot {
    let records = (0..n).map(|i| {
        let mut rec = ClassRecord::new(iri(i));
        if i > 0 {
            let k = rng.gen_range(0..=max_parents.min(i));
            for _ in 0..k {
                rec.parents.insert(iri(rng.gen_range(0..i)));
            }
        }
        if labelled && rng.gen_bool(0.9) {
            let words = rng.gen_range(1..=3);
            let label: Vec<&str> = (0..words).map(|_| *WORDS.choose(rng).unwrap()).collect();
            rec.add_label(RDFS_LABEL, label.join(" "));
        }
        rec
    });
    OntologySnapshot::new("http://t.org/onto", OWL_THING, records).unwrap()
}

/// Reachability oracle: every class reachable upward from `start` over
/// asserted parent edges (root excluded, start excluded unless on a cycle).
pub fn ancestors(onto: &OntologySnapshot, start: &str) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<String> = VecDeque::from([start.to_string()]);
    while let Some(x) = queue.pop_front() {
        for p in &onto.get(&x).unwrap().parents {
            if p != OWL_THING && seen.insert(p.clone()) {
                queue.push_back(p.clone());
            }
        }
    }
    seen
}

pub fn ancestry_restricted(
    onto: &OntologySnapshot,
    keep: &BTreeSet<String>,
) -> BTreeMap<String, BTreeSet<String>> {
    keep.iter()
        .map(|c| {
            let anc = ancestors(onto, c).into_iter().filter(|a| keep.contains(a)).collect();
            (c.clone(), anc)
        })
        .collect()
}

/// Undirected hop distances from `anchor` over non-root edges.
pub fn hop_distances(onto: &OntologySnapshot, anchor: &str) -> BTreeMap<String, usize> {
    let mut dist = BTreeMap::from([(anchor.to_string(), 0)]);
    let mut queue = VecDeque::from([anchor.to_string()]);
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        for nb in onto.neighbours(&x).unwrap() {
            if !dist.contains_key(nb) {
                dist.insert(nb.to_string(), d + 1);
                queue.push_back(nb.to_string());
            }
        }
    }
    dist
}
