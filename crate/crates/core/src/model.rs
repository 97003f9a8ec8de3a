//! Immutable named-class ontology model.
//!
//! An [`OntologySnapshot`] holds named classes, their annotation labels and
//! asserted parent edges. Snapshots never change once built; edits go through
//! a [`HierarchyEditor`], which produces a fresh snapshot.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// IRI of the OWL universal class.
pub const OWL_THING: &str = "http://www.w3.org/2002/07/owl#Thing";

pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassRecord {
    pub iri: String,
    /// Annotation property IRI -> literal values.
    pub labels: BTreeMap<String, Vec<String>>,
    /// Asserted named subsumers.
    pub parents: BTreeSet<String>,
    pub deprecated: bool,
}

impl ClassRecord {
    pub fn new(iri: impl Into<String>) -> Self {
        Self {
            iri: iri.into(),
            labels: BTreeMap::new(),
            parents: BTreeSet::new(),
            deprecated: false,
        }
    }

    pub fn with_parent(mut self, parent: impl Into<String>) -> Self {
        self.parents.insert(parent.into());
        self
    }

    pub fn with_label(mut self, property: impl Into<String>, value: impl Into<String>) -> Self {
        self.add_label(property, value);
        self
    }

    pub fn with_deprecated(mut self, deprecated: bool) -> Self {
        self.deprecated = deprecated;
        self
    }

    /// Adds a label value, ignoring empty strings and duplicates.
    pub fn add_label(&mut self, property: impl Into<String>, value: impl Into<String>) {
        let value = value.into();
        if value.is_empty() {
            return;
        }
        let values = self.labels.entry(property.into()).or_default();
        if !values.contains(&value) {
            values.push(value);
        }
    }

    /// Label values under the given properties, or under every property when
    /// `properties` is empty.
    pub fn label_values<'a>(&'a self, properties: &'a [String]) -> impl Iterator<Item = &'a str> {
        self.labels
            .iter()
            .filter(move |(prop, _)| properties.is_empty() || properties.contains(prop))
            .flat_map(|(_, values)| values.iter().map(String::as_str))
    }

    fn normalize_labels(&mut self) {
        for values in self.labels.values_mut() {
            let mut seen = BTreeSet::new();
            values.retain(|v| !v.is_empty() && seen.insert(v.clone()));
        }
        self.labels.retain(|_, values| !values.is_empty());
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OntologySnapshot {
    ontology_iri: String,
    root_iri: String,
    classes: BTreeMap<String, ClassRecord>,
    children: BTreeMap<String, BTreeSet<String>>,
}

impl OntologySnapshot {
    /// Builds a snapshot, validating that class IRIs are unique and nonempty
    /// and that every parent is either a known class or the root.
    pub fn new(
        ontology_iri: impl Into<String>,
        root_iri: impl Into<String>,
        records: impl IntoIterator<Item = ClassRecord>,
    ) -> Result<Self> {
        let root_iri = root_iri.into();
        let mut classes = BTreeMap::new();
        for mut record in records {
            if record.iri.is_empty() {
                return Err(Error::InvalidSnapshot("empty class IRI".into()));
            }
            if record.iri == root_iri {
                return Err(Error::InvalidSnapshot(format!(
                    "root {} declared as an ordinary class",
                    root_iri
                )));
            }
            if record.parents.contains(&record.iri) {
                return Err(Error::InvalidSnapshot(format!(
                    "class {} lists itself as a parent",
                    record.iri
                )));
            }
            record.normalize_labels();
            if let Some(prev) = classes.insert(record.iri.clone(), record) {
                return Err(Error::InvalidSnapshot(format!(
                    "duplicate class {}",
                    prev.iri
                )));
            }
        }
        for record in classes.values() {
            if let Some(p) = record
                .parents
                .iter()
                .find(|p| **p != root_iri && !classes.contains_key(*p))
            {
                return Err(Error::InvalidSnapshot(format!(
                    "class {} has unknown parent {}",
                    record.iri, p
                )));
            }
        }
        Ok(Self::from_parts(ontology_iri.into(), root_iri, classes))
    }

    /// An ontology with no classes, rooted at `owl:Thing`.
    pub fn empty(ontology_iri: impl Into<String>) -> Self {
        Self::from_parts(ontology_iri.into(), OWL_THING.to_string(), BTreeMap::new())
    }

    fn from_parts(
        ontology_iri: String,
        root_iri: String,
        classes: BTreeMap<String, ClassRecord>,
    ) -> Self {
        let mut children: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for record in classes.values() {
            for p in record.parents.iter().filter(|p| **p != root_iri) {
                children
                    .entry(p.clone())
                    .or_default()
                    .insert(record.iri.clone());
            }
        }
        Self {
            ontology_iri,
            root_iri,
            classes,
            children,
        }
    }

    pub fn ontology_iri(&self) -> &str {
        &self.ontology_iri
    }

    pub fn root_iri(&self) -> &str {
        &self.root_iri
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn contains(&self, iri: &str) -> bool {
        self.classes.contains_key(iri)
    }

    pub fn get(&self, iri: &str) -> Option<&ClassRecord> {
        self.classes.get(iri)
    }

    pub fn class(&self, iri: &str) -> Result<&ClassRecord> {
        self.classes
            .get(iri)
            .ok_or_else(|| Error::UnknownClass(iri.to_string()))
    }

    /// Classes in IRI order.
    pub fn classes(&self) -> impl Iterator<Item = &ClassRecord> {
        self.classes.values()
    }

    pub fn iris(&self) -> impl Iterator<Item = &str> {
        self.classes.keys().map(String::as_str)
    }

    /// Asserted subsumers of `iri`, root excluded.
    pub fn asserted_parents(&self, iri: &str) -> Result<BTreeSet<&str>> {
        let record = self.class(iri)?;
        Ok(record
            .parents
            .iter()
            .filter(|p| **p != self.root_iri)
            .map(String::as_str)
            .collect())
    }

    /// Classes asserting `iri` as a direct parent.
    pub fn asserted_children(&self, iri: &str) -> Result<BTreeSet<&str>> {
        self.class(iri)?;
        Ok(self
            .children
            .get(iri)
            .map(|c| c.iter().map(String::as_str).collect())
            .unwrap_or_default())
    }

    /// Parents and children of `iri`: its neighbours in the undirected
    /// subsumption graph with the root removed.
    pub fn neighbours(&self, iri: &str) -> Result<BTreeSet<&str>> {
        let mut out = self.asserted_parents(iri)?;
        out.extend(self.asserted_children(iri)?);
        Ok(out)
    }

    /// Every class reachable from `iri` through one or more parent edges,
    /// root excluded. Contains `iri` itself only when it sits on a cycle.
    pub fn transitive_subsumers(&self, iri: &str) -> Result<BTreeSet<&str>> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&str> = self.asserted_parents(iri)?.into_iter().collect();
        while let Some(next) = stack.pop() {
            if !seen.insert(next) {
                continue;
            }
            if let Some(record) = self.classes.get(next) {
                stack.extend(
                    record
                        .parents
                        .iter()
                        .filter(|p| **p != self.root_iri && !seen.contains(p.as_str()))
                        .map(String::as_str),
                );
            }
        }
        Ok(seen)
    }

    /// Removes `iri` and asserts each of its children as a subclass of each of
    /// its parents. The receiver is left untouched.
    pub fn delete_class_preserving_hierarchy(&self, iri: &str) -> Result<Self> {
        self.delete_classes_preserving_hierarchy([iri])
    }

    /// Sequential hierarchy-preserving deletion of several classes.
    pub fn delete_classes_preserving_hierarchy<'a>(
        &self,
        iris: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self> {
        let mut editor = HierarchyEditor::new(self);
        for iri in iris {
            editor.delete(iri)?;
        }
        Ok(editor.finish())
    }
}

/// Mutable working copy of a snapshot used for batches of edits.
#[derive(Debug, Clone)]
pub struct HierarchyEditor {
    ontology_iri: String,
    root_iri: String,
    classes: BTreeMap<String, ClassRecord>,
    children: BTreeMap<String, BTreeSet<String>>,
}

impl HierarchyEditor {
    pub fn new(snapshot: &OntologySnapshot) -> Self {
        Self {
            ontology_iri: snapshot.ontology_iri.clone(),
            root_iri: snapshot.root_iri.clone(),
            classes: snapshot.classes.clone(),
            children: snapshot.children.clone(),
        }
    }

    pub fn contains(&self, iri: &str) -> bool {
        self.classes.contains_key(iri)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Current asserted parents of `iri`, root excluded, in IRI order.
    pub fn asserted_parents(&self, iri: &str) -> Result<Vec<&str>> {
        let record = self
            .classes
            .get(iri)
            .ok_or_else(|| Error::UnknownClass(iri.to_string()))?;
        Ok(record
            .parents
            .iter()
            .filter(|p| **p != self.root_iri)
            .map(String::as_str)
            .collect())
    }

    /// Drops every label stored under `property`, on all classes.
    pub fn strip_label_property(&mut self, property: &str) {
        for record in self.classes.values_mut() {
            record.labels.remove(property);
        }
    }

    pub fn delete(&mut self, iri: &str) -> Result<()> {
        let record = self
            .classes
            .remove(iri)
            .ok_or_else(|| Error::UnknownClass(iri.to_string()))?;
        let kids = self.children.remove(iri).unwrap_or_default();
        let parents: Vec<&String> = record
            .parents
            .iter()
            .filter(|p| **p != self.root_iri)
            .collect();
        for p in &parents {
            if let Some(siblings) = self.children.get_mut(p.as_str()) {
                siblings.remove(iri);
            }
        }
        for kid in &kids {
            if let Some(child) = self.classes.get_mut(kid) {
                child.parents.remove(iri);
                for p in parents.iter().filter(|p| **p != kid) {
                    child.parents.insert((*p).clone());
                    self.children
                        .entry((*p).clone())
                        .or_default()
                        .insert(kid.clone());
                }
            }
        }
        Ok(())
    }

    pub fn finish(self) -> OntologySnapshot {
        let mut children = self.children;
        children.retain(|_, kids| !kids.is_empty());
        OntologySnapshot {
            ontology_iri: self.ontology_iri,
            root_iri: self.root_iri,
            classes: self.classes,
            children,
        }
    }
}
