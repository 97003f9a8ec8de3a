//! Canonical JSON snapshot format.
//!
//! ```json
//! {
//!   "ontology_iri": "...",
//!   "root_iri": "http://www.w3.org/2002/07/owl#Thing",
//!   "classes": [
//!     {"iri": "...", "labels": {"prop": ["..."]}, "parents": ["..."], "deprecated": false}
//!   ]
//! }
//! ```
//!
//! Export sorts classes, parents and label properties, so two exports of the
//! same snapshot are byte-identical.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fingerprint::sha256_hex;
use crate::model::{ClassRecord, OntologySnapshot, OWL_THING};

#[derive(Serialize)]
struct SnapshotDoc<'a> {
    ontology_iri: &'a str,
    root_iri: &'a str,
    classes: Vec<ClassDoc<'a>>,
}

#[derive(Serialize)]
struct ClassDoc<'a> {
    iri: &'a str,
    labels: &'a BTreeMap<String, Vec<String>>,
    parents: &'a BTreeSet<String>,
    deprecated: bool,
}

pub fn export_json(onto: &OntologySnapshot) -> Vec<u8> {
    let doc = SnapshotDoc {
        ontology_iri: onto.ontology_iri(),
        root_iri: onto.root_iri(),
        classes: onto
            .classes()
            .map(|c| ClassDoc {
                iri: &c.iri,
                labels: &c.labels,
                parents: &c.parents,
                deprecated: c.deprecated,
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("snapshot serialization cannot fail");
    out.push(b'\n');
    out
}

/// Content hash of the canonical export.
pub fn snapshot_fingerprint(onto: &OntologySnapshot) -> String {
    sha256_hex(&export_json(onto))
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn string_at<'v>(value: &'v Value, path: &str) -> Result<&'v str> {
    value
        .as_str()
        .ok_or_else(|| schema(path, "expected a string"))
}

pub fn import_json(input: &[u8]) -> Result<OntologySnapshot> {
    let doc: Value = serde_json::from_slice(input).map_err(|e| schema("$", e.to_string()))?;
    let top = doc
        .as_object()
        .ok_or_else(|| schema("$", "expected an object"))?;
    let ontology_iri = match top.get("ontology_iri") {
        Some(v) => string_at(v, "ontology_iri")?,
        None => return Err(schema("ontology_iri", "missing required field")),
    };
    let root_iri = match top.get("root_iri") {
        Some(v) => string_at(v, "root_iri")?,
        None => OWL_THING,
    };
    let classes = top
        .get("classes")
        .ok_or_else(|| schema("classes", "missing required field"))?
        .as_array()
        .ok_or_else(|| schema("classes", "expected an array"))?;

    let mut records = Vec::with_capacity(classes.len());
    let mut seen = BTreeMap::new();
    for (k, entry) in classes.iter().enumerate() {
        let here = format!("classes[{}]", k);
        let obj = entry
            .as_object()
            .ok_or_else(|| schema(&here, "expected an object"))?;
        let iri_path = format!("{}.iri", here);
        let iri = match obj.get("iri") {
            Some(v) => string_at(v, &iri_path)?,
            None => return Err(schema(iri_path, "missing required field")),
        };
        if iri.is_empty() {
            return Err(schema(iri_path, "empty IRI"));
        }
        if iri == root_iri {
            return Err(schema(iri_path, "root IRI declared as a class"));
        }
        if seen.insert(iri.to_string(), k).is_some() {
            return Err(schema(iri_path, format!("duplicate class {}", iri)));
        }
        let mut record = ClassRecord::new(iri);
        if let Some(labels) = obj.get("labels") {
            let labels_path = format!("{}.labels", here);
            let labels = labels
                .as_object()
                .ok_or_else(|| schema(&labels_path, "expected an object"))?;
            for (prop, values) in labels {
                let prop_path = format!("{}.{}", labels_path, prop);
                let values = values
                    .as_array()
                    .ok_or_else(|| schema(&prop_path, "expected an array"))?;
                for (j, v) in values.iter().enumerate() {
                    record.add_label(prop, string_at(v, &format!("{}[{}]", prop_path, j))?);
                }
            }
        }
        if let Some(parents) = obj.get("parents") {
            let parents_path = format!("{}.parents", here);
            let parents = parents
                .as_array()
                .ok_or_else(|| schema(&parents_path, "expected an array"))?;
            for (j, p) in parents.iter().enumerate() {
                let p = string_at(p, &format!("{}[{}]", parents_path, j))?;
                if p == iri {
                    return Err(schema(
                        format!("{}[{}]", parents_path, j),
                        "class lists itself as a parent",
                    ));
                }
                record.parents.insert(p.to_string());
            }
        }
        if let Some(dep) = obj.get("deprecated") {
            record.deprecated = dep
                .as_bool()
                .ok_or_else(|| schema(format!("{}.deprecated", here), "expected a boolean"))?;
        }
        records.push(record);
    }

    for (k, record) in records.iter().enumerate() {
        for p in &record.parents {
            if p != root_iri && !seen.contains_key(p) {
                let j = classes[k]["parents"]
                    .as_array()
                    .and_then(|a| a.iter().position(|v| v.as_str() == Some(p)))
                    .unwrap_or(0);
                return Err(schema(
                    format!("classes[{}].parents[{}]", k, j),
                    format!("unknown parent {}", p),
                ));
            }
        }
    }
    OntologySnapshot::new(ontology_iri, root_iri, records)
}
