//! Benchmark dataset construction: pruning, equivalence extraction from a hub
//! table, and subsumption mapping construction by class deletion.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fingerprint::derive_seed;
use crate::mapping::{MappingSet, Relation};
use crate::model::{HierarchyEditor, OntologySnapshot};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HubConcept {
    /// Ontology ID -> member class IRIs.
    pub members: BTreeMap<String, Vec<String>>,
    /// Set when the source row had missing or empty class IDs.
    pub invalid: bool,
}

/// Cross-reference table linking hub concepts to classes of several
/// ontologies: `{concept_id: {ontology_id: [iri, ...]}}`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HubTable {
    pub entries: BTreeMap<String, HubConcept>,
}

/// JSON object entries in document order, keeping duplicate keys visible.
struct RawEntries(Vec<(String, Value)>);

impl<'de> Deserialize<'de> for RawEntries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct EntriesVisitor;
        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = RawEntries;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object of hub concepts")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<RawEntries, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, Value>()? {
                    out.push((k, v));
                }
                Ok(RawEntries(out))
            }
        }
        deserializer.deserialize_map(EntriesVisitor)
    }
}

impl HubTable {
    pub fn from_json(input: &[u8]) -> Result<Self> {
        let raw: RawEntries = serde_json::from_slice(input).map_err(|e| Error::Schema {
            path: "$".into(),
            message: e.to_string(),
        })?;
        let mut entries = BTreeMap::new();
        for (concept_id, value) in raw.0 {
            let mut concept = HubConcept::default();
            let obj = value.as_object().ok_or_else(|| Error::Schema {
                path: concept_id.clone(),
                message: "expected an object of ontology IDs".into(),
            })?;
            for (onto_id, iris) in obj {
                let mut list: Vec<String> = Vec::new();
                match iris {
                    Value::Array(items) => {
                        for item in items {
                            match item.as_str().map(str::trim) {
                                Some(iri) if !iri.is_empty() => {
                                    if !list.iter().any(|x| x == iri) {
                                        list.push(iri.to_string());
                                    }
                                }
                                _ => concept.invalid = true,
                            }
                        }
                    }
                    Value::String(iri) if !iri.trim().is_empty() => list.push(iri.trim().to_string()),
                    _ => concept.invalid = true,
                }
                if list.is_empty() {
                    concept.invalid = true;
                }
                concept.members.insert(onto_id.clone(), list);
            }
            if entries.insert(concept_id.clone(), concept).is_some() {
                return Err(Error::Schema {
                    path: concept_id,
                    message: "duplicate hub concept ID".into(),
                });
            }
        }
        Ok(Self { entries })
    }

    /// Rewrites compact IRIs (`PREFIX:local`) whose prefix appears in
    /// `prefixes` into full IRIs.
    pub fn expand_curies(&self, prefixes: &BTreeMap<String, String>) -> Self {
        let expand = |iri: &String| -> String {
            match iri.split_once(':') {
                Some((prefix, local)) if !local.starts_with("//") => match prefixes.get(prefix) {
                    Some(ns) => format!("{}{}", ns, local),
                    None => iri.clone(),
                },
                _ => iri.clone(),
            }
        };
        Self {
            entries: self
                .entries
                .iter()
                .map(|(id, c)| {
                    (
                        id.clone(),
                        HubConcept {
                            members: c
                                .members
                                .iter()
                                .map(|(o, iris)| (o.clone(), iris.iter().map(expand).collect()))
                                .collect(),
                            invalid: c.invalid,
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn invalid_count(&self) -> usize {
        self.entries.values().filter(|c| c.invalid).count()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PruneReport {
    pub kept: usize,
    pub removed: usize,
    pub unknown_preserved: Vec<String>,
}

/// Keeps exactly the preserved classes, deleting every other class with
/// hierarchy-preserving deletion. Unknown IRIs in `preserve` are reported and
/// ignored.
pub fn prune(
    onto: &OntologySnapshot,
    preserve: &BTreeSet<String>,
) -> Result<(OntologySnapshot, PruneReport)> {
    let unknown_preserved: Vec<String> = preserve
        .iter()
        .filter(|iri| !onto.contains(iri))
        .cloned()
        .collect();
    if preserve.is_empty() {
        log::warn!("empty preserved set; pruning yields an empty ontology");
    }
    if !unknown_preserved.is_empty() {
        log::warn!(
            "{} preserved IRIs are not classes of {}",
            unknown_preserved.len(),
            onto.ontology_iri()
        );
    }
    let doomed: Vec<&str> = onto.iris().filter(|iri| !preserve.contains(*iri)).collect();
    let mut editor = HierarchyEditor::new(onto);
    for iri in &doomed {
        editor.delete(iri)?;
    }
    let pruned = editor.finish();
    let report = PruneReport {
        kept: pruned.len(),
        removed: doomed.len(),
        unknown_preserved,
    };
    Ok((pruned, report))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExtractReport {
    pub mappings: usize,
    /// Hub concepts that yielded no pair.
    pub unmatched_concepts: usize,
    pub invalid_concepts: usize,
    pub missing_src: usize,
    pub missing_tgt: usize,
}

/// Pairs every source-ontology member of a hub concept with every
/// target-ontology member, keeping pairs whose classes exist in the
/// respective snapshots.
pub fn extract_equivalence(
    hub: &HubTable,
    src_id: &str,
    onto_src: &OntologySnapshot,
    tgt_id: &str,
    onto_tgt: &OntologySnapshot,
) -> (MappingSet, ExtractReport) {
    let mut out = MappingSet::new(Relation::Equivalence);
    let mut report = ExtractReport::default();
    for concept in hub.entries.values() {
        if concept.invalid {
            report.invalid_concepts += 1;
        }
        let srcs: Vec<&String> = concept
            .members
            .get(src_id)
            .map(|v| v.iter().collect())
            .unwrap_or_default();
        let tgts: Vec<&String> = concept
            .members
            .get(tgt_id)
            .map(|v| v.iter().collect())
            .unwrap_or_default();
        let srcs_ok: Vec<&String> = srcs.iter().copied().filter(|s| onto_src.contains(s)).collect();
        let tgts_ok: Vec<&String> = tgts.iter().copied().filter(|t| onto_tgt.contains(t)).collect();
        report.missing_src += srcs.len() - srcs_ok.len();
        report.missing_tgt += tgts.len() - tgts_ok.len();
        if srcs_ok.is_empty() || tgts_ok.is_empty() {
            report.unmatched_concepts += 1;
            continue;
        }
        for s in &srcs_ok {
            for t in &tgts_ok {
                out.insert(s.as_str(), t.as_str(), Some(1.0));
            }
        }
    }
    report.mappings = out.len();
    (out, report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum BuildOutcome {
    Emitted { parent: String },
    SkippedDeleted,
    NoParent,
    Unknown,
}

/// One step of subsumption construction, in processing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuildEvent {
    pub src: String,
    pub equiv_tgt: String,
    #[serde(flatten)]
    pub outcome: BuildOutcome,
}

#[derive(Debug, Clone)]
pub struct SubsumptionBuildResult {
    pub modified_target: OntologySnapshot,
    pub subs_mappings: MappingSet,
    /// Equivalences whose target had already been deleted.
    pub skipped_equivalences: usize,
    /// Equivalences whose target had no named parent.
    pub no_parent_skips: usize,
    /// Equivalences referencing classes absent from the inputs.
    pub unknown_skips: usize,
    /// Emitted subsumptions dropped because their target was deleted later.
    pub removed_subsumptions: usize,
    /// Emitted subsumptions identical to an earlier one.
    pub duplicate_subsumptions: usize,
    pub deleted_classes: BTreeSet<String>,
    pub log: Vec<BuildEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuildReport {
    pub equivalences: usize,
    pub subsumptions: usize,
    pub skipped_equivalences: usize,
    pub no_parent_skips: usize,
    pub unknown_skips: usize,
    pub removed_subsumptions: usize,
    pub duplicate_subsumptions: usize,
    pub deleted_classes: usize,
}

impl SubsumptionBuildResult {
    pub fn report(&self, equivalences: usize) -> BuildReport {
        BuildReport {
            equivalences,
            subsumptions: self.subs_mappings.len(),
            skipped_equivalences: self.skipped_equivalences,
            no_parent_skips: self.no_parent_skips,
            unknown_skips: self.unknown_skips,
            removed_subsumptions: self.removed_subsumptions,
            duplicate_subsumptions: self.duplicate_subsumptions,
            deleted_classes: self.deleted_classes.len(),
        }
    }
}

/// Turns equivalence mappings (c, c') into subsumption mappings (c, c'')
/// where c'' is a seeded-uniform pick among the asserted parents of c'. Each
/// used c' is deleted from the target with hierarchy preservation;
/// equivalences hitting an already deleted c' are skipped and emitted
/// mappings whose c'' is deleted afterwards are removed.
pub fn build_subsumption_dataset(
    onto_src: &OntologySnapshot,
    onto_tgt: &OntologySnapshot,
    equiv: &MappingSet,
    seed: u64,
) -> SubsumptionBuildResult {
    let mut editor = HierarchyEditor::new(onto_tgt);
    let mut deleted = BTreeSet::new();
    let mut emitted: Vec<(String, String)> = Vec::new();
    let mut log = Vec::with_capacity(equiv.len());
    let (mut skipped, mut no_parent, mut unknown) = (0, 0, 0);

    for (c, c_prime) in equiv.pairs() {
        let outcome = if deleted.contains(c_prime) {
            skipped += 1;
            BuildOutcome::SkippedDeleted
        } else if !onto_src.contains(c) || !editor.contains(c_prime) {
            log::warn!("equivalence ({}, {}) references an unknown class", c, c_prime);
            unknown += 1;
            BuildOutcome::Unknown
        } else {
            let parents = editor
                .asserted_parents(c_prime)
                .expect("checked above")
                .into_iter()
                .map(str::to_string)
                .collect::<Vec<_>>();
            if parents.is_empty() {
                no_parent += 1;
                BuildOutcome::NoParent
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &["subs", c, c_prime]));
                let parent = parents[rng.gen_range(0..parents.len())].clone();
                editor.delete(c_prime).expect("checked above");
                deleted.insert(c_prime.to_string());
                emitted.push((c.to_string(), parent.clone()));
                BuildOutcome::Emitted { parent }
            }
        };
        log.push(BuildEvent {
            src: c.to_string(),
            equiv_tgt: c_prime.to_string(),
            outcome,
        });
    }

    let mut subs = MappingSet::new(Relation::Subsumption);
    let (mut removed, mut duplicates) = (0, 0);
    for (c, parent) in emitted {
        if deleted.contains(&parent) {
            removed += 1;
        } else if !subs.insert(c, parent, Some(1.0)) {
            duplicates += 1;
        }
    }

    SubsumptionBuildResult {
        modified_target: editor.finish(),
        subs_mappings: subs,
        skipped_equivalences: skipped,
        no_parent_skips: no_parent,
        unknown_skips: unknown,
        removed_subsumptions: removed,
        duplicate_subsumptions: duplicates,
        deleted_classes: deleted,
        log,
    }
}
