//! Cross-ontology mappings and the TSV mapping file format.
//!
//! Mapping files carry the header `SrcEntity\tTgtEntity\tScore` and one
//! mapping per row. The relation is fixed per file and is not stored in it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TSV_HEADER: &str = "SrcEntity\tTgtEntity\tScore";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Equivalence,
    Subsumption,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Equivalence => f.write_str("equivalence"),
            Relation::Subsumption => f.write_str("subsumption"),
        }
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equivalence" | "equiv" => Ok(Relation::Equivalence),
            "subsumption" | "subs" => Ok(Relation::Subsumption),
            other => Err(Error::InvalidConfig(format!("unknown relation {}", other))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mapping {
    pub src: String,
    pub tgt: String,
    pub relation: Relation,
    pub score: Option<f64>,
}

impl Mapping {
    pub fn new(src: impl Into<String>, tgt: impl Into<String>, relation: Relation) -> Self {
        Self {
            src: src.into(),
            tgt: tgt.into(),
            relation,
            score: None,
        }
    }

    pub fn with_score(mut self, score: f64) -> Self {
        self.score = Some(score);
        self
    }
}

/// A set of mappings of one relation type, keyed and ordered by
/// (source IRI, target IRI). Scores do not take part in set identity.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingSet {
    relation: Relation,
    entries: BTreeMap<(String, String), Option<f64>>,
}

impl MappingSet {
    pub fn new(relation: Relation) -> Self {
        Self {
            relation,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_pairs<S: Into<String>>(
        relation: Relation,
        pairs: impl IntoIterator<Item = (S, S)>,
    ) -> Self {
        let mut set = Self::new(relation);
        for (s, t) in pairs {
            set.insert(s, t, None);
        }
        set
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inserts a pair; returns false when it was already present (the score
    /// is then overwritten).
    pub fn insert(&mut self, src: impl Into<String>, tgt: impl Into<String>, score: Option<f64>) -> bool {
        self.entries.insert((src.into(), tgt.into()), score).is_none()
    }

    pub fn push(&mut self, mapping: Mapping) -> bool {
        self.insert(mapping.src, mapping.tgt, mapping.score)
    }

    pub fn remove(&mut self, src: &str, tgt: &str) -> bool {
        self.entries
            .remove(&(src.to_string(), tgt.to_string()))
            .is_some()
    }

    pub fn contains(&self, src: &str, tgt: &str) -> bool {
        self.entries.contains_key(&(src.to_string(), tgt.to_string()))
    }

    pub fn score(&self, src: &str, tgt: &str) -> Option<f64> {
        self.entries
            .get(&(src.to_string(), tgt.to_string()))
            .copied()
            .flatten()
    }

    /// (src, tgt) pairs in canonical order.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.keys().map(|(s, t)| (s.as_str(), t.as_str()))
    }

    pub fn iter(&self) -> impl Iterator<Item = Mapping> + '_ {
        self.entries.iter().map(move |((s, t), score)| Mapping {
            src: s.clone(),
            tgt: t.clone(),
            relation: self.relation,
            score: *score,
        })
    }

    /// Targets mapped from `src`.
    pub fn targets_of<'a>(&'a self, src: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.entries
            .range((src.to_string(), String::new())..)
            .take_while(move |((s, _), _)| s == src)
            .map(|((_, t), _)| t.as_str())
    }

    pub fn intersection_count(&self, other: &MappingSet) -> usize {
        self.entries
            .keys()
            .filter(|k| other.entries.contains_key(*k))
            .count()
    }

    /// Mappings of `self` not in `other`.
    pub fn difference(&self, other: &MappingSet) -> MappingSet {
        MappingSet {
            relation: self.relation,
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| !other.entries.contains_key(*k))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.len() + 1));
        out.push_str(TSV_HEADER);
        out.push('\n');
        for ((s, t), score) in &self.entries {
            out.push_str(s);
            out.push('\t');
            out.push_str(t);
            out.push('\t');
            if let Some(score) = score {
                out.push_str(&format!("{:?}", score));
            }
            out.push('\n');
        }
        out
    }

    /// Parses a TSV mapping file. Rows with an empty score column get no score.
    pub fn from_tsv(text: &str, relation: Relation) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim_end_matches('\r') == TSV_HEADER => {}
            Some((_, header)) => {
                return Err(Error::MappingFormat {
                    line: 1,
                    message: format!("expected header {:?}, found {:?}", TSV_HEADER, header),
                })
            }
            None => {
                return Err(Error::MappingFormat {
                    line: 1,
                    message: "missing header".into(),
                })
            }
        }
        let mut set = Self::new(relation);
        for (i, line) in lines {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() < 2 || cols.len() > 3 || cols[0].is_empty() || cols[1].is_empty() {
                return Err(Error::MappingFormat {
                    line: i + 1,
                    message: "expected SrcEntity, TgtEntity and Score columns".into(),
                });
            }
            let score = match cols.get(2).map(|s| s.trim()) {
                None | Some("") => None,
                Some(raw) => Some(raw.parse::<f64>().map_err(|_| Error::MappingFormat {
                    line: i + 1,
                    message: format!("invalid score {:?}", raw),
                })?),
            };
            set.insert(cols[0], cols[1], score);
        }
        Ok(set)
    }
}
