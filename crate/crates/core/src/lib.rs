//! Construction and evaluation of machine-learning-friendly ontology
//! matching benchmarks.
//!
//! The pipeline: import and preprocess ontologies ([`import`]), prune them
//! and derive equivalence and subsumption reference mappings ([`build`]),
//! sample hard negative candidates ([`sampling`]), split references and
//! compute ranking and matching metrics ([`metrics`]). [`editsim`] is a
//! runnable edit-distance baseline.

pub mod build;
pub mod candidates;
pub mod editsim;
pub mod error;
pub mod fingerprint;
pub mod import;
pub mod mapping;
pub mod metrics;
pub mod model;
pub mod parallel;
pub mod sampling;

pub use error::{Error, Result};
pub use mapping::{Mapping, MappingSet, Relation};
pub use model::{ClassRecord, HierarchyEditor, OntologySnapshot, OWL_THING, RDFS_LABEL};
