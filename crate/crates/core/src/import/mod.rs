//! Ontology ingestion: RDF/XML subset, canonical JSON, and preprocessing.

mod json;
mod preprocess;
mod rdfxml;

pub use json::{export_json, import_json, snapshot_fingerprint};
pub use preprocess::{preprocess, ImportConfig, OBO_HAS_DB_XREF};
pub use rdfxml::{import_rdfxml_subset, ImportReport, OWL_DEPRECATED};
