use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::model::OntologySnapshot;
use crate::sampling::tokenize::Tokenizer;

/// Sub-word token -> classes whose labels contain it.
#[derive(Debug, Clone, PartialEq)]
pub struct InvertedIndex {
    postings: BTreeMap<String, BTreeSet<String>>,
    class_tokens: BTreeMap<String, BTreeSet<String>>,
    class_count: usize,
}

pub fn build_inverted_index(
    onto: &OntologySnapshot,
    synonym_properties: &[String],
    tokenizer: &Tokenizer,
) -> InvertedIndex {
    let mut postings: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut class_tokens = BTreeMap::new();
    for class in onto.classes() {
        let labels: Vec<&str> = class.label_values(synonym_properties).collect();
        let tokens: BTreeSet<String> = tokenizer.tokenize(&labels).into_iter().collect();
        for t in &tokens {
            postings
                .entry(t.clone())
                .or_default()
                .insert(class.iri.clone());
        }
        class_tokens.insert(class.iri.clone(), tokens);
    }
    InvertedIndex {
        postings,
        class_tokens,
        class_count: onto.len(),
    }
}

fn token_set<S: AsRef<str>>(tokens: &[S]) -> BTreeSet<&str> {
    tokens.iter().map(AsRef::as_ref).collect()
}

impl InvertedIndex {
    /// |C'|: number of indexed classes, label-less ones included.
    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn postings(&self, token: &str) -> Option<&BTreeSet<String>> {
        self.postings.get(token)
    }

    pub fn tokens(&self) -> impl Iterator<Item = (&str, &BTreeSet<String>)> {
        self.postings.iter().map(|(t, p)| (t.as_str(), p))
    }

    /// Distinct tokens of an indexed class.
    pub fn class_tokens(&self, iri: &str) -> Option<&BTreeSet<String>> {
        self.class_tokens.get(iri)
    }

    pub fn classes(&self) -> impl Iterator<Item = &str> {
        self.class_tokens.keys().map(String::as_str)
    }

    /// log10(|C'| / |I(t)|), or `None` for tokens outside the index.
    pub fn idf(&self, token: &str) -> Option<f64> {
        self.postings
            .get(token)
            .map(|p| (self.class_count as f64 / p.len() as f64).log10())
    }

    /// Sum of idf weights over the tokens shared by `a` and `b`.
    pub fn idf_score<A: AsRef<str>, B: AsRef<str>>(&self, a: &[A], b: &[B]) -> f64 {
        let b = token_set(b);
        token_set(a)
            .into_iter()
            .filter(|t| b.contains(t))
            .filter_map(|t| self.idf(t))
            .sum()
    }

    /// Top-`n` classes by idf score against `query`, descending, ties broken
    /// by IRI. Zero-score classes only appear to fill up to `n`.
    pub fn idf_sample<S: AsRef<str>>(&self, query: &[S], n: usize) -> Vec<String> {
        let mut scores: HashMap<&str, f64> = HashMap::new();
        for t in token_set(query) {
            if let (Some(posting), Some(w)) = (self.postings.get(t), self.idf(t)) {
                for iri in posting {
                    *scores.entry(iri.as_str()).or_insert(0.0) += w;
                }
            }
        }
        let mut ranked: Vec<(&str, f64)> = scores.into_iter().filter(|(_, s)| *s > 0.0).collect();
        ranked.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.0.cmp(b.0))
        });
        ranked.truncate(n);
        let mut out: Vec<String> = ranked.iter().map(|(iri, _)| iri.to_string()).collect();
        if out.len() < n {
            let taken: BTreeSet<&str> = ranked.iter().map(|(iri, _)| *iri).collect();
            let fill = n - out.len();
            out.extend(
                self.classes()
                    .filter(|iri| !taken.contains(iri))
                    .take(fill)
                    .map(str::to_string),
            );
        }
        out
    }
}
