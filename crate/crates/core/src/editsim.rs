//! Edit-similarity baseline matcher.
//!
//! Two classes score the maximum of `1 - lev(a, b) / max(|a|, |b|)` over all
//! pairs of their (lowercased, whitespace-collapsed) labels. Matching uses the
//! target inverted index to shortlist candidates per source class.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::candidates::ScoredRecord;
use crate::error::{Error, Result};
use crate::mapping::{MappingSet, Relation};
use crate::model::OntologySnapshot;
use crate::sampling::{CandidateRecord, InvertedIndex, Tokenizer};

pub const DEFAULT_CANDIDATE_K: usize = 200;
pub const DEFAULT_THRESHOLD: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatcherConfig {
    pub threshold: f64,
    pub candidate_k: usize,
    pub synonym_properties: Vec<String>,
    /// Emit every target at or above the threshold instead of the single best.
    pub all_above_threshold: bool,
}

impl Default for MatcherConfig {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            candidate_k: DEFAULT_CANDIDATE_K,
            synonym_properties: Vec::new(),
            all_above_threshold: false,
        }
    }
}

impl MatcherConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold.is_finite() && self.threshold >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "threshold {} must be a non-negative number",
                self.threshold
            )));
        }
        if self.candidate_k == 0 {
            return Err(Error::InvalidConfig("candidate_k must be at least 1".into()));
        }
        Ok(())
    }
}

pub fn normalize_label(label: &str) -> String {
    label
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Levenshtein distance over Unicode scalar values.
pub fn levenshtein(a: &[char], b: &[char]) -> usize {
    if a.len() < b.len() {
        return levenshtein(b, a);
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

fn similarity_chars(a: &[char], b: &[char]) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / longest as f64
}

/// `1 - normalized edit distance` between two raw strings.
pub fn normalized_edit_similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = normalize_label(a).chars().collect();
    let b: Vec<char> = normalize_label(b).chars().collect();
    similarity_chars(&a, &b)
}

fn prepared<S: AsRef<str>>(labels: &[S]) -> Vec<Vec<char>> {
    let mut out: Vec<Vec<char>> = labels
        .iter()
        .map(|l| normalize_label(l.as_ref()))
        .filter(|l| !l.is_empty())
        .map(|l| l.chars().collect())
        .collect();
    out.sort();
    out.dedup();
    out
}

fn best_pair(a: &[Vec<char>], b: &[Vec<char>]) -> Option<f64> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let mut best: f64 = 0.0;
    for x in a {
        for y in b {
            best = best.max(similarity_chars(x, y));
            if best == 1.0 {
                return Some(best);
            }
        }
    }
    Some(best)
}

/// Maximum normalized edit similarity over all label pairs, or `None` when
/// either side has no usable label.
pub fn try_edit_similarity<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B]) -> Option<f64> {
    best_pair(&prepared(a), &prepared(b))
}

/// Like [`try_edit_similarity`] but scores label-less pairs 0.
pub fn edit_similarity<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B]) -> f64 {
    try_edit_similarity(a, b).unwrap_or(0.0)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MatchStats {
    pub sources: usize,
    pub unlabeled_sources: usize,
    pub matched_sources: usize,
}

/// Matches every labelled source class against its top `candidate_k` index
/// candidates, keeping pairs scoring at least `threshold`. By default only
/// the best target per source is kept (ties go to the smaller IRI).
pub fn match_ontologies(
    onto_src: &OntologySnapshot,
    onto_tgt: &OntologySnapshot,
    index: &InvertedIndex,
    tokenizer: &Tokenizer,
    cfg: &MatcherConfig,
    jobs: usize,
) -> Result<(MappingSet, MatchStats)> {
    cfg.validate()?;
    let props = &cfg.synonym_properties;
    let targets: BTreeMap<&str, Vec<Vec<char>>> = onto_tgt
        .classes()
        .map(|c| {
            let labels: Vec<&str> = c.label_values(props).collect();
            (c.iri.as_str(), prepared(&labels))
        })
        .collect();
    let sources: Vec<_> = onto_src.classes().collect();

    let per_source: Vec<Option<Vec<(String, String, f64)>>> = crate::parallel::run(jobs, || {
        sources
            .par_iter()
            .map(|src| {
                let labels: Vec<&str> = src.label_values(props).collect();
                let mine = prepared(&labels);
                if mine.is_empty() {
                    return None;
                }
                let query = tokenizer.tokenize(&labels);
                let mut hits: Vec<(String, f64)> = index
                    .idf_sample(&query, cfg.candidate_k)
                    .into_iter()
                    .filter_map(|tgt| {
                        let score = best_pair(&mine, targets.get(tgt.as_str())?)?;
                        (score >= cfg.threshold).then_some((tgt, score))
                    })
                    .collect();
                hits.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
                if !cfg.all_above_threshold {
                    hits.truncate(1);
                }
                Some(
                    hits.into_iter()
                        .map(|(t, s)| (src.iri.clone(), t, s))
                        .collect(),
                )
            })
            .collect()
    });

    let mut out = MappingSet::new(Relation::Equivalence);
    let mut stats = MatchStats {
        sources: sources.len(),
        ..MatchStats::default()
    };
    for found in per_source {
        match found {
            None => stats.unlabeled_sources += 1,
            Some(rows) => {
                if !rows.is_empty() {
                    stats.matched_sources += 1;
                }
                for (s, t, score) in rows {
                    out.insert(s, t, Some(score));
                }
            }
        }
    }
    if stats.unlabeled_sources > 0 {
        log::warn!("{} source classes have no labels", stats.unlabeled_sources);
    }
    Ok((out, stats))
}

/// Outcome of threshold selection on a validation split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdChoice {
    pub threshold: f64,
    pub f1: f64,
    /// Fraction of validation mappings recovered at the chosen threshold.
    pub hit_accuracy: f64,
}

/// Candidate thresholds 0.50, 0.51, ..., 1.00.
pub fn default_threshold_grid() -> Vec<f64> {
    (50..=100).map(|i| i as f64 / 100.0).collect()
}

/// Picks the grid threshold that maximizes F1 of `scored` restricted to the
/// sources of `val` (the only sources whose correct targets are known at
/// validation time). `scored` should be an unfiltered one-best matcher
/// output. Ties go to the higher threshold.
pub fn tune_threshold(scored: &MappingSet, val: &MappingSet, grid: &[f64]) -> Option<ThresholdChoice> {
    if val.is_empty() {
        return None;
    }
    let sources: std::collections::BTreeSet<&str> = val.pairs().map(|(s, _)| s).collect();
    let relevant: Vec<(bool, f64)> = scored
        .iter()
        .filter(|m| sources.contains(m.src.as_str()))
        .map(|m| (val.contains(&m.src, &m.tgt), m.score.unwrap_or(0.0)))
        .collect();
    let mut best: Option<ThresholdChoice> = None;
    for &t in grid {
        let kept = relevant.iter().filter(|(_, s)| *s >= t);
        let (n_out, n_hit) = kept.fold((0usize, 0usize), |(o, h), (hit, _)| (o + 1, h + usize::from(*hit)));
        let p = if n_out == 0 { 0.0 } else { n_hit as f64 / n_out as f64 };
        let r = n_hit as f64 / val.len() as f64;
        let f1 = crate::metrics::f_beta(p, r, 1.0);
        if best.is_none_or(|b| f1 > b.f1 || (f1 == b.f1 && t > b.threshold)) {
            best = Some(ThresholdChoice {
                threshold: t,
                f1,
                hit_accuracy: r,
            });
        }
    }
    best
}

/// Attaches edit-similarity scores for the positive and every negative.
pub fn score_candidates(
    records: &[CandidateRecord],
    onto_src: &OntologySnapshot,
    onto_tgt: &OntologySnapshot,
    synonym_properties: &[String],
    jobs: usize,
) -> Vec<Result<ScoredRecord>> {
    let labels_of = |onto: &OntologySnapshot, iri: &str| -> Result<Vec<Vec<char>>> {
        let class = onto.class(iri)?;
        let labels: Vec<&str> = class.label_values(synonym_properties).collect();
        Ok(prepared(&labels))
    };
    crate::parallel::run(jobs, || {
        records
            .par_iter()
            .map(|rec| {
                let src = labels_of(onto_src, &rec.mapping.src)?;
                let score = |iri: &str| -> Result<f64> {
                    Ok(best_pair(&src, &labels_of(onto_tgt, iri)?).unwrap_or(0.0))
                };
                let tgt_score = score(&rec.mapping.tgt)?;
                let scores = rec
                    .candidates
                    .iter()
                    .map(|c| score(c).map(Some))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ScoredRecord {
                    src: rec.mapping.src.clone(),
                    tgt: rec.mapping.tgt.clone(),
                    candidates: rec.candidates.clone(),
                    scores,
                    tgt_score: Some(tgt_score),
                })
            })
            .collect()
    })
}
