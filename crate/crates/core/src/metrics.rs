//! Evaluation: reference splits, local ranking metrics (MRR, Hits@K) and
//! global matching metrics (precision, recall, F-beta).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::candidates::ScoredRecord;
use crate::error::{Error, Result};
use crate::mapping::{MappingSet, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitScheme {
    /// 10% validation, 90% test.
    Unsupervised,
    /// 20% train, 10% validation, 70% test.
    SemiSupervised,
}

impl fmt::Display for SplitScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitScheme::Unsupervised => "unsupervised",
            SplitScheme::SemiSupervised => "semi_supervised",
        })
    }
}

impl FromStr for SplitScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unsupervised" | "unsup" => Ok(SplitScheme::Unsupervised),
            "semi_supervised" | "semi-supervised" | "semi" => Ok(SplitScheme::SemiSupervised),
            other => Err(Error::InvalidConfig(format!("unknown split scheme {}", other))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitBundle {
    pub train: MappingSet,
    pub val: MappingSet,
    pub test: MappingSet,
    pub seed: u64,
    pub scheme: SplitScheme,
}

/// round(n * tenths / 10) with halves rounded up.
pub fn tenths_round_half_up(n: usize, tenths: usize) -> usize {
    (n * tenths + 5) / 10
}

/// Shuffles the canonically ordered references with `seed` and cuts them
/// into train/validation/test according to `scheme`.
pub fn split_references(refs: &MappingSet, scheme: SplitScheme, seed: u64) -> Result<SplitBundle> {
    if refs.is_empty() {
        return Err(Error::EmptyReferences);
    }
    let n = refs.len();
    if n < 10 {
        log::warn!("splitting only {} reference mappings", n);
    }
    let mut order: Vec<_> = refs.iter().collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = match scheme {
        SplitScheme::Unsupervised => 0,
        SplitScheme::SemiSupervised => tenths_round_half_up(n, 2),
    };
    let n_val = tenths_round_half_up(n, 1);
    let relation = refs.relation();
    let mut bundle = SplitBundle {
        train: MappingSet::new(relation),
        val: MappingSet::new(relation),
        test: MappingSet::new(relation),
        seed,
        scheme,
    };
    for (i, m) in order.into_iter().enumerate() {
        let dest = if i < n_train {
            &mut bundle.train
        } else if i < n_train + n_val {
            &mut bundle.val
        } else {
            &mut bundle.test
        };
        dest.push(m);
    }
    Ok(bundle)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingReport {
    pub mrr: f64,
    pub hits: BTreeMap<usize, f64>,
    /// Records evaluated.
    pub n: usize,
    /// Records excluded for missing or malformed scores.
    pub excluded: usize,
}

/// Rank of the positive among itself and its negatives. Ties count against
/// the positive.
pub fn rank_of(record: &ScoredRecord) -> Option<usize> {
    let positive = record.tgt_score.filter(|s| s.is_finite())?;
    if record.scores.len() != record.candidates.len() {
        return None;
    }
    let mut rank = 1;
    for s in &record.scores {
        let s = s.filter(|s| s.is_finite())?;
        if s >= positive {
            rank += 1;
        }
    }
    Some(rank)
}

pub fn local_ranking_metrics(records: &[ScoredRecord], ks: &[usize]) -> Result<RankingReport> {
    let ranks: Vec<usize> = records.iter().filter_map(rank_of).collect();
    let excluded = records.len() - ranks.len();
    if excluded > 0 {
        log::warn!("{} records lack complete scores and were excluded", excluded);
    }
    if ranks.is_empty() {
        return Err(Error::NoEvaluableRecords);
    }
    let n = ranks.len() as f64;
    let mrr = ranks.iter().map(|r| 1.0 / *r as f64).sum::<f64>() / n;
    let hits = ks
        .iter()
        .map(|&k| (k, ranks.iter().filter(|r| **r <= k).count() as f64 / n))
        .collect();
    Ok(RankingReport {
        mrr,
        hits,
        n: ranks.len(),
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchReport {
    pub precision: f64,
    /// `None` for subsumption references, which are incomplete by
    /// construction.
    pub recall: Option<f64>,
    pub f_beta: Option<f64>,
    pub beta: f64,
    pub n_out: usize,
    pub n_ref: usize,
    pub n_eval: usize,
    pub n_hits: usize,
    /// Set when the precision denominator was empty.
    pub precision_undefined: bool,
}

pub fn f_beta(precision: f64, recall: f64, beta: f64) -> f64 {
    if precision * recall == 0.0 {
        return 0.0;
    }
    let b2 = beta * beta;
    (1.0 + b2) * precision * recall / (b2 * precision + recall)
}

/// Precision, recall and F-beta of `out` against `refs`. With `eval`
/// (a subset of `refs`, e.g. the test split), reference mappings outside
/// `eval` are removed from `out` before computing precision, and recall is
/// measured against `eval`.
pub fn global_matching_metrics(
    out: &MappingSet,
    refs: &MappingSet,
    eval: Option<&MappingSet>,
    beta: f64,
) -> MatchReport {
    let eval = eval.unwrap_or(refs);
    let held_out = refs.difference(eval);
    let counted = out.difference(&held_out);
    let n_hits = out.intersection_count(eval);
    let precision_undefined = counted.is_empty();
    let precision = if precision_undefined {
        0.0
    } else {
        n_hits as f64 / counted.len() as f64
    };
    let (recall, f) = if refs.relation() == Relation::Subsumption {
        (None, None)
    } else {
        let r = if eval.is_empty() {
            0.0
        } else {
            n_hits as f64 / eval.len() as f64
        };
        (Some(r), Some(f_beta(precision, r, beta)))
    };
    MatchReport {
        precision,
        recall,
        f_beta: f,
        beta,
        n_out: out.len(),
        n_ref: refs.len(),
        n_eval: eval.len(),
        n_hits,
        precision_undefined,
    }
}

fn hits_as_strings<S: Serializer>(
    hits: &Option<BTreeMap<usize, f64>>,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    match hits {
        None => serializer.serialize_none(),
        Some(h) => {
            use serde::ser::SerializeMap;
            let mut map = serializer.serialize_map(Some(h.len()))?;
            for (k, v) in h {
                map.serialize_entry(&k.to_string(), v)?;
            }
            map.end()
        }
    }
}

/// Combined report file: `{"MRR", "Hits", "P", "R", "F1"}`, with nulls for
/// fields that were not computed.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EvalReport {
    #[serde(rename = "MRR")]
    pub mrr: Option<f64>,
    #[serde(rename = "Hits", serialize_with = "hits_as_strings")]
    pub hits: Option<BTreeMap<usize, f64>>,
    #[serde(rename = "P")]
    pub precision: Option<f64>,
    #[serde(rename = "R")]
    pub recall: Option<f64>,
    #[serde(rename = "F1")]
    pub f1: Option<f64>,
}

impl EvalReport {
    pub fn from_ranking(r: &RankingReport) -> Self {
        Self {
            mrr: Some(r.mrr),
            hits: Some(r.hits.clone()),
            ..Self::default()
        }
    }

    pub fn from_matching(m: &MatchReport) -> Self {
        Self {
            precision: Some(m.precision),
            recall: m.recall,
            f1: m.f_beta,
            ..Self::default()
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("report serialization cannot fail");
        out.push(b'\n');
        out
    }
}
