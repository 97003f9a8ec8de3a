//! JSON Lines candidate files.
//!
//! Plain: `{"src": IRI, "tgt": IRI, "candidates": [IRI, ...]}` (the positive
//! `tgt` is not listed among the candidates). Scored files add a parallel
//! `"scores"` array and `"tgt_score"`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapping::{Mapping, Relation};
use crate::sampling::CandidateRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CandidateLine {
    src: String,
    tgt: String,
    candidates: Vec<String>,
}

/// A candidate record with per-candidate scores. Missing or null scores are
/// kept as `None` so evaluation can report and exclude the record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredRecord {
    pub src: String,
    pub tgt: String,
    pub candidates: Vec<String>,
    #[serde(default)]
    pub scores: Vec<Option<f64>>,
    #[serde(default)]
    pub tgt_score: Option<f64>,
}

fn to_jsonl<T: Serialize>(items: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(&item).expect("record serialization cannot fail"));
        out.push('\n');
    }
    out
}

fn from_jsonl<T: DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Schema {
                path: format!("line {}", i + 1),
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn write_candidates(records: &[CandidateRecord]) -> String {
    to_jsonl(records.iter().map(|r| CandidateLine {
        src: r.mapping.src.clone(),
        tgt: r.mapping.tgt.clone(),
        candidates: r.candidates.clone(),
    }))
}

pub fn read_candidates(text: &str, relation: Relation) -> Result<Vec<CandidateRecord>> {
    Ok(from_jsonl::<CandidateLine>(text)?
        .into_iter()
        .map(|l| CandidateRecord {
            mapping: Mapping::new(l.src, l.tgt, relation),
            candidates: l.candidates,
        })
        .collect())
}

pub fn write_scored(records: &[ScoredRecord]) -> String {
    to_jsonl(records)
}

pub fn read_scored(text: &str) -> Result<Vec<ScoredRecord>> {
    from_jsonl(text)
}

/// Reads the tab-separated candidate layout `SrcEntity, TgtEntity,
/// TgtCandidates` where the last column is a bracketed, quoted, comma
/// separated list. A copy of the positive inside the list is dropped.
pub fn read_tsv_candidates(text: &str, relation: Relation) -> Result<Vec<CandidateRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end().starts_with("SrcEntity\tTgtEntity\tTgtCandidates") => {}
        _ => {
            return Err(Error::MappingFormat {
                line: 1,
                message: "expected header SrcEntity\tTgtEntity\tTgtCandidates".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 3 {
            return Err(Error::MappingFormat {
                line: i + 1,
                message: format!("expected 3 columns, found {}", cols.len()),
            });
        }
        let (src, tgt) = (cols[0].trim(), cols[1].trim());
        let inner = cols[2].trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let candidates = inner
            .split(',')
            .map(|c| c.trim().trim_matches(['\'', '"']))
            .filter(|c| !c.is_empty() && *c != tgt)
            .map(str::to_string)
            .collect();
        out.push(CandidateRecord {
            mapping: Mapping::new(src, tgt, relation),
            candidates,
        });
    }
    Ok(out)
}
