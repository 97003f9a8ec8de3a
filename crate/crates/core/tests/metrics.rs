use std::collections::BTreeSet;

use ombench_core::candidates::ScoredRecord;
use ombench_core::metrics::{
    global_matching_metrics, local_ranking_metrics, split_references, tenths_round_half_up, SplitScheme,
};
use ombench_core::{MappingSet, Relation};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn refs(n: usize) -> MappingSet {
    MappingSet::from_pairs(Relation::Equivalence, (0..n).map(|i| (format!("s{i}"), format!("t{i}"))))
}

fn pairs(m: &MappingSet) -> BTreeSet<(String, String)> {
    m.pairs().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

proptest! {
    #[test]
    fn splits_partition_the_references(n in 10usize..=10_000, seed in any::<u64>(), semi in any::<bool>()) {
        let scheme = if semi { SplitScheme::SemiSupervised } else { SplitScheme::Unsupervised };
        let r = refs(n);
        let b = split_references(&r, scheme, seed).unwrap();
        let (tr, va, te) = (pairs(&b.train), pairs(&b.val), pairs(&b.test));
        prop_assert!(tr.is_disjoint(&va) && tr.is_disjoint(&te) && va.is_disjoint(&te));
        let union: BTreeSet<_> = tr.iter().chain(&va).chain(&te).cloned().collect();
        prop_assert_eq!(union, pairs(&r));
        let want_train = if semi { tenths_round_half_up(n, 2) } else { 0 };
        prop_assert_eq!(tr.len(), want_train);
        prop_assert_eq!(va.len(), tenths_round_half_up(n, 1));
        prop_assert_eq!(b, split_references(&r, scheme, seed).unwrap());
    }

    #[test]
    fn adjusted_precision_reduces_to_plain(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let universe: Vec<(String, String)> =
            (0..30).map(|i| (format!("s{}", i % 10), format!("t{}", i))).collect();
        let pick = |rng: &mut ChaCha8Rng, p: f64| {
            MappingSet::from_pairs(Relation::Equivalence, universe.iter().filter(|_| rng.gen_bool(p)).cloned())
        };
        let r = pick(&mut rng, 0.4);
        let out = pick(&mut rng, 0.5);
        let plain = global_matching_metrics(&out, &r, None, 1.0);
        let adjusted = global_matching_metrics(&out, &r, Some(&r), 1.0);
        prop_assert_eq!(plain, adjusted);
    }
}

fn brute_rank(pos: f64, negs: &[f64]) -> usize {
    // sort descending with the positive placed after equal-scoring negatives
    let mut all: Vec<(f64, bool)> = negs.iter().map(|s| (*s, false)).collect();
    all.push((pos, true));
    all.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    all.iter().position(|(_, is_pos)| *is_pos).unwrap() + 1
}

#[test]
fn ranking_matches_resort_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..500 {
        let n_rec = rng.gen_range(1..20);
        let records: Vec<ScoredRecord> = (0..n_rec)
            .map(|_| {
                let k = rng.gen_range(0..=20);
                // coarse scores so ties are common
                let negs: Vec<f64> = (0..k).map(|_| rng.gen_range(0..5) as f64 / 4.0).collect();
                ScoredRecord {
                    src: "s".into(),
                    tgt: "t".into(),
                    candidates: (0..k).map(|i| format!("c{i}")).collect(),
                    scores: negs.iter().map(|s| Some(*s)).collect(),
                    tgt_score: Some(rng.gen_range(0..5) as f64 / 4.0),
                }
            })
            .collect();
        let ranks: Vec<usize> = records
            .iter()
            .map(|r| brute_rank(r.tgt_score.unwrap(), &r.scores.iter().map(|s| s.unwrap()).collect::<Vec<_>>()))
            .collect();
        let ks = [1, 3, 5, 10];
        let report = local_ranking_metrics(&records, &ks).unwrap();
        let n = ranks.len() as f64;
        let mrr: f64 = ranks.iter().map(|r| 1.0 / *r as f64).sum::<f64>() / n;
        assert!((report.mrr - mrr).abs() < 1e-12);
        for k in ks {
            let h = ranks.iter().filter(|r| **r <= k).count() as f64 / n;
            assert!((report.hits[&k] - h).abs() < 1e-12);
        }
        let hs: Vec<f64> = report.hits.values().copied().collect();
        assert!(hs.windows(2).all(|w| w[0] <= w[1]));
        assert!(report.mrr >= report.hits[&1]);
    }
}

#[test]
fn matching_metrics_are_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..300 {
        let r = MappingSet::from_pairs(
            Relation::Equivalence,
            (0..20).filter(|_| rng.gen_bool(0.5)).map(|i| (format!("s{i}"), format!("t{i}"))),
        );
        if r.is_empty() {
            continue;
        }
        let mut out = MappingSet::from_pairs(
            Relation::Equivalence,
            (0..20)
                .map(|i| (i, rng.gen_bool(0.5), rng.gen_range(0..2)))
                .filter(|(_, keep, _)| *keep)
                .map(|(i, _, off)| (format!("s{i}"), format!("t{}", i + off)))
                .collect::<Vec<_>>(),
        );
        let before = global_matching_metrics(&out, &r, None, 1.0);
        let missing: Vec<(String, String)> = r
            .pairs()
            .filter(|(s, t)| !out.contains(s, t))
            .map(|(s, t)| (s.to_string(), t.to_string()))
            .collect();
        if let Some((s, t)) = missing.first() {
            let mut more = out.clone();
            more.insert(s.clone(), t.clone(), None);
            let after = global_matching_metrics(&more, &r, None, 1.0);
            assert!(after.recall.unwrap() >= before.recall.unwrap());
        }
        out.insert("wrong", "nothing", None);
        let after = global_matching_metrics(&out, &r, None, 1.0);
        assert!(after.precision <= before.precision || before.precision_undefined);
    }
}
