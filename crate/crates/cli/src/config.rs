use std::path::Path;

use anyhow::Context;
use serde::Deserialize;

pub const DEFAULT_SEED: u64 = 42;

/// Annotation properties read as class names when none are given.
pub const DEFAULT_LABEL_PROPERTIES: &[&str] = &[
    "http://www.w3.org/2000/01/rdf-schema#label",
    "http://www.geneontology.org/formats/oboInOwl#hasExactSynonym",
    "http://www.w3.org/2004/02/skos/core#prefLabel",
    "http://www.w3.org/2004/02/skos/core#altLabel",
];

/// Optional JSON config file. Every field can also be set by a flag, and
/// flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub synonym_properties: Option<Vec<String>>,
    pub xref_properties: Option<Vec<String>>,
    pub keep_deprecated: Option<bool>,
    pub idf: Option<usize>,
    pub neighbour: Option<usize>,
    pub random: Option<usize>,
    pub max_hops: Option<usize>,
    pub vocab: Option<String>,
    pub scheme: Option<String>,
    pub ks: Option<Vec<usize>>,
    pub beta: Option<f64>,
    pub threshold: Option<f64>,
    pub candidate_k: Option<usize>,
    pub prefixes: Option<std::collections::BTreeMap<String, String>>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read(p).with_context(|| format!("reading config {}", p.display()))?;
                serde_json::from_slice(&text).with_context(|| format!("parsing config {}", p.display()))
            }
        }
    }

    pub fn label_properties(&self, flags: &[String]) -> Vec<String> {
        if !flags.is_empty() {
            return flags.to_vec();
        }
        self.synonym_properties
            .clone()
            .unwrap_or_else(|| DEFAULT_LABEL_PROPERTIES.iter().map(|s| s.to_string()).collect())
    }
}
