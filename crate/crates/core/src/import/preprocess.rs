use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{HierarchyEditor, OntologySnapshot, RDFS_LABEL};

/// Cross-reference annotation property stripped by default.
pub const OBO_HAS_DB_XREF: &str = "http://www.geneontology.org/formats/oboInOwl#hasDbXref";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportConfig {
    pub xref_properties: Vec<String>,
    pub synonym_properties: Vec<String>,
    pub drop_deprecated: bool,
}

impl Default for ImportConfig {
    fn default() -> Self {
        Self {
            xref_properties: vec![OBO_HAS_DB_XREF.to_string()],
            synonym_properties: vec![RDFS_LABEL.to_string()],
            drop_deprecated: true,
        }
    }
}

impl ImportConfig {
    pub fn validate(&self) -> Result<()> {
        let mut xref = BTreeSet::new();
        for p in &self.xref_properties {
            if !xref.insert(p) {
                return Err(Error::InvalidConfig(format!("duplicate xref property {}", p)));
            }
        }
        let mut syn = BTreeSet::new();
        for p in &self.synonym_properties {
            if !syn.insert(p) {
                return Err(Error::InvalidConfig(format!("duplicate synonym property {}", p)));
            }
            if xref.contains(p) {
                return Err(Error::InvalidConfig(format!(
                    "{} is both a synonym and a cross-reference property",
                    p
                )));
            }
        }
        Ok(())
    }
}

/// Strips cross-reference annotations and removes deprecated classes,
/// re-linking their children to their parents.
pub fn preprocess(onto: &OntologySnapshot, cfg: &ImportConfig) -> Result<OntologySnapshot> {
    cfg.validate()?;
    let mut editor = HierarchyEditor::new(onto);
    for prop in &cfg.xref_properties {
        editor.strip_label_property(prop);
    }
    if cfg.drop_deprecated {
        let deprecated: Vec<&str> = onto
            .classes()
            .filter(|c| c.deprecated)
            .map(|c| c.iri.as_str())
            .collect();
        for iri in deprecated {
            editor.delete(iri)?;
        }
    }
    Ok(editor.finish())
}
