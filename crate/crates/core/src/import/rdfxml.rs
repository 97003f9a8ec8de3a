//! Streaming reader for the RDF/XML subset used by OWL exports.
//!
//! Recognized constructs:
//! - `owl:Class` / `rdf:Description` node elements identified by
//!   `rdf:about` or `rdf:ID`,
//! - `rdfs:subClassOf` pointing at a named class (by `rdf:resource` or a
//!   nested `owl:Class rdf:about`),
//! - literal annotation assertions, keyed by property IRI,
//! - `owl:deprecated` with a literal `true`.
//!
//! Everything else is skipped and counted in the [`ImportReport`].

use std::collections::BTreeMap;

use quick_xml::events::{BytesStart, Event};
use quick_xml::name::{Namespace, ResolveResult};
use quick_xml::NsReader;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ClassRecord, OntologySnapshot, OWL_THING};

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL_NS: &str = "http://www.w3.org/2002/07/owl#";
pub const OWL_DEPRECATED: &str = "http://www.w3.org/2002/07/owl#deprecated";
const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";

/// Warning counters collected while importing a document.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ImportReport {
    pub classes: usize,
    pub duplicate_declarations: usize,
    pub dangling_edges: usize,
    pub self_edges: usize,
    pub skipped_restrictions: usize,
    pub skipped_elements: usize,
    pub non_class_subjects: usize,
    pub unresolvable_iris: usize,
}

#[derive(Default)]
struct Subject {
    declarations: usize,
    typed_class: bool,
    parents: Vec<String>,
    labels: Vec<(String, String)>,
    deprecated: bool,
}

enum Frame {
    Root,
    Header,
    Subject(String),
    SubClassOf {
        subject: String,
        named: Vec<String>,
        complex: bool,
    },
    NestedClass,
    Literal {
        subject: String,
        property: String,
        text: String,
        structured: bool,
    },
    Skip,
}

struct Parser<'a> {
    input: &'a [u8],
    base: Option<String>,
    ontology_iri: Option<String>,
    subjects: BTreeMap<String, Subject>,
    report: ImportReport,
    stack: Vec<Frame>,
}

/// Parses an RDF/XML document into a snapshot. `base` is the document IRI
/// used when the document carries no `xml:base`.
pub fn import_rdfxml_subset(
    input: &[u8],
    base: Option<&str>,
) -> Result<(OntologySnapshot, ImportReport)> {
    let mut parser = Parser {
        input,
        base: base.map(str::to_string),
        ontology_iri: None,
        subjects: BTreeMap::new(),
        report: ImportReport::default(),
        stack: Vec::new(),
    };
    parser.run()?;
    parser.finish()
}

fn has_scheme(iri: &str) -> bool {
    let mut chars = iri.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    for c in chars {
        match c {
            ':' => return true,
            c if c.is_ascii_alphanumeric() || c == '+' || c == '-' || c == '.' => {}
            _ => return false,
        }
    }
    false
}

fn normalize_space(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn expanded_name(ns: &ResolveResult, local: &[u8]) -> String {
    let local = String::from_utf8_lossy(local);
    match ns {
        ResolveResult::Bound(Namespace(ns)) => format!("{}{}", String::from_utf8_lossy(ns), local),
        _ => local.into_owned(),
    }
}

impl<'a> Parser<'a> {
    fn position_error(&self, pos: u64, message: String) -> Error {
        let pos = (pos as usize).min(self.input.len());
        let prefix = &self.input[..pos];
        let line = prefix.iter().filter(|b| **b == b'\n').count() + 1;
        let line_start = prefix
            .iter()
            .rposition(|b| *b == b'\n')
            .map(|i| i + 1)
            .unwrap_or(0);
        let column = String::from_utf8_lossy(&prefix[line_start..]).chars().count() + 1;
        Error::MalformedXml {
            line,
            column,
            message,
        }
    }

    fn resolve(&mut self, reference: &str) -> Option<String> {
        if has_scheme(reference) {
            return Some(reference.to_string());
        }
        let joined = self
            .base
            .as_deref()
            .and_then(|b| url::Url::parse(b).ok())
            .and_then(|b| b.join(reference).ok())
            .map(String::from);
        if joined.is_none() {
            self.report.unresolvable_iris += 1;
        }
        joined
    }

    fn run(&mut self) -> Result<()> {
        let mut reader = NsReader::from_reader(self.input);
        reader.config_mut().trim_text(false);
        loop {
            let event = reader.read_resolved_event();
            let (ns, event) = match event {
                Ok(ev) => ev,
                Err(e) => {
                    let pos = reader.error_position();
                    return Err(self.position_error(pos, e.to_string()));
                }
            };
            match event {
                Event::Start(e) => {
                    let name = expanded_name(&ns, e.local_name().as_ref());
                    let attrs = self.attributes(&reader, &e)?;
                    self.start(&name, &attrs);
                }
                Event::Empty(e) => {
                    let name = expanded_name(&ns, e.local_name().as_ref());
                    let attrs = self.attributes(&reader, &e)?;
                    self.start(&name, &attrs);
                    self.end();
                }
                Event::End(_) => self.end(),
                Event::Text(t) => {
                    if matches!(self.stack.last(), Some(Frame::Literal { .. })) {
                        let value = match t.unescape() {
                            Ok(v) => v.into_owned(),
                            Err(e) => {
                                return Err(
                                    self.position_error(reader.buffer_position(), e.to_string())
                                )
                            }
                        };
                        if let Some(Frame::Literal { text, .. }) = self.stack.last_mut() {
                            text.push_str(&value);
                        }
                    }
                }
                Event::CData(c) => {
                    if let Some(Frame::Literal { text, .. }) = self.stack.last_mut() {
                        text.push_str(&String::from_utf8_lossy(&c.into_inner()));
                    }
                }
                Event::Eof => {
                    if !self.stack.is_empty() {
                        let pos = reader.buffer_position();
                        return Err(self.position_error(
                            pos,
                            "unexpected end of document: unclosed elements".into(),
                        ));
                    }
                    return Ok(());
                }
                _ => {}
            }
        }
    }

    /// Resolved attributes as (expanded name, value).
    fn attributes(
        &self,
        reader: &NsReader<&[u8]>,
        e: &BytesStart<'_>,
    ) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for attr in e.attributes() {
            let attr = attr.map_err(|err| {
                self.position_error(reader.buffer_position(), err.to_string())
            })?;
            if attr.key.as_ref() == b"xml:base" {
                let value = attr
                    .unescape_value()
                    .map_err(|err| self.position_error(reader.buffer_position(), err.to_string()))?;
                out.push(("xml:base".to_string(), value.into_owned()));
                continue;
            }
            let (ns, local) = reader.resolve_attribute(attr.key);
            let value = attr
                .unescape_value()
                .map_err(|err| self.position_error(reader.buffer_position(), err.to_string()))?;
            out.push((expanded_name(&ns, local.as_ref()), value.into_owned()));
        }
        Ok(out)
    }

    fn subject_iri(&mut self, attrs: &[(String, String)]) -> Option<String> {
        let about = format!("{}about", RDF_NS);
        let id = format!("{}ID", RDF_NS);
        if let Some((_, v)) = attrs.iter().find(|(k, _)| *k == about) {
            return self.resolve(v);
        }
        if let Some((_, v)) = attrs.iter().find(|(k, _)| *k == id) {
            return self.resolve(&format!("#{}", v));
        }
        None
    }

    fn resource(&mut self, attrs: &[(String, String)]) -> Option<Option<String>> {
        let key = format!("{}resource", RDF_NS);
        attrs
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v.clone())
            .map(|v| self.resolve(&v))
    }

    fn start(&mut self, name: &str, attrs: &[(String, String)]) {
        let frame = match self.stack.last() {
            None => {
                if let Some((_, b)) = attrs.iter().find(|(k, _)| k == "xml:base") {
                    self.base = Some(b.clone());
                }
                Frame::Root
            }
            Some(Frame::Root) => self.node_element(name, attrs),
            Some(Frame::Subject(subject)) => {
                let subject = subject.clone();
                self.property_element(subject, name, attrs)
            }
            Some(Frame::SubClassOf { .. }) => {
                let nested = if name == OWL_CLASS && attrs.len() == 1 {
                    self.subject_iri(attrs)
                } else {
                    None
                };
                if let Some(Frame::SubClassOf { named, complex, .. }) = self.stack.last_mut() {
                    match nested {
                        Some(iri) => named.push(iri),
                        None => *complex = true,
                    }
                }
                Frame::NestedClass
            }
            Some(Frame::NestedClass) => {
                // a nested class with its own content is a class expression
                if let Some(Frame::SubClassOf { complex, .. }) =
                    self.stack.iter_mut().rev().nth(1)
                {
                    *complex = true;
                }
                Frame::Skip
            }
            Some(Frame::Literal { .. }) => {
                if let Some(Frame::Literal { structured, .. }) = self.stack.last_mut() {
                    *structured = true;
                }
                Frame::Skip
            }
            Some(Frame::Header) | Some(Frame::Skip) => Frame::Skip,
        };
        self.stack.push(frame);
    }

    fn node_element(&mut self, name: &str, attrs: &[(String, String)]) -> Frame {
        if name == format!("{}Ontology", OWL_NS) {
            if let Some(iri) = self.subject_iri(attrs) {
                self.ontology_iri = Some(iri);
            }
            return Frame::Header;
        }
        let is_class = name == OWL_CLASS;
        if !is_class && name != format!("{}Description", RDF_NS) {
            self.report.skipped_elements += 1;
            return Frame::Skip;
        }
        let Some(iri) = self.subject_iri(attrs) else {
            // anonymous node
            self.report.skipped_elements += 1;
            return Frame::Skip;
        };
        let subject = self.subjects.entry(iri.clone()).or_default();
        if is_class {
            subject.declarations += 1;
        }
        Frame::Subject(iri)
    }

    fn property_element(&mut self, subject: String, name: &str, attrs: &[(String, String)]) -> Frame {
        if name == format!("{}subClassOf", RDFS_NS) {
            return match self.resource(attrs) {
                Some(Some(parent)) => {
                    self.subjects
                        .entry(subject)
                        .or_default()
                        .parents
                        .push(parent);
                    Frame::Skip
                }
                Some(None) => {
                    self.report.dangling_edges += 1;
                    Frame::Skip
                }
                None => Frame::SubClassOf {
                    subject,
                    named: Vec::new(),
                    complex: false,
                },
            };
        }
        if name == format!("{}type", RDF_NS) {
            if let Some(Some(ty)) = self.resource(attrs) {
                if ty == OWL_CLASS {
                    self.subjects.entry(subject).or_default().typed_class = true;
                }
            }
            return Frame::Skip;
        }
        if self.resource(attrs).is_some() {
            self.report.skipped_elements += 1;
            return Frame::Skip;
        }
        Frame::Literal {
            subject,
            property: name.to_string(),
            text: String::new(),
            structured: false,
        }
    }

    fn end(&mut self) {
        let Some(frame) = self.stack.pop() else {
            return;
        };
        match frame {
            Frame::SubClassOf {
                subject,
                named,
                complex,
            } => {
                if complex || named.len() != 1 {
                    self.report.skipped_restrictions += 1;
                } else {
                    self.subjects
                        .entry(subject)
                        .or_default()
                        .parents
                        .extend(named);
                }
            }
            Frame::Literal {
                subject,
                property,
                text,
                structured,
            } => {
                if structured {
                    self.report.skipped_elements += 1;
                    return;
                }
                let value = normalize_space(&text);
                let entry = self.subjects.entry(subject).or_default();
                if property == OWL_DEPRECATED {
                    entry.deprecated = value == "true";
                } else if !value.is_empty() {
                    entry.labels.push((property, value));
                }
            }
            _ => {}
        }
    }

    fn finish(mut self) -> Result<(OntologySnapshot, ImportReport)> {
        let subjects = std::mem::take(&mut self.subjects);
        let is_class = |s: &Subject| s.declarations > 0 || s.typed_class;
        let class_iris: std::collections::BTreeSet<String> = subjects
            .iter()
            .filter(|(_, s)| is_class(s))
            .map(|(iri, _)| iri.clone())
            .collect();
        let mut records = Vec::with_capacity(class_iris.len());
        for (iri, subject) in subjects {
            if !is_class(&subject) {
                self.report.non_class_subjects += 1;
                continue;
            }
            if iri == OWL_THING {
                continue;
            }
            if subject.declarations > 1 {
                self.report.duplicate_declarations += subject.declarations - 1;
            }
            let mut record = ClassRecord::new(iri.clone()).with_deprecated(subject.deprecated);
            for parent in subject.parents {
                if parent == iri {
                    self.report.self_edges += 1;
                } else if parent == OWL_THING || class_iris.contains(&parent) {
                    record.parents.insert(parent);
                } else {
                    self.report.dangling_edges += 1;
                }
            }
            for (prop, value) in subject.labels {
                record.add_label(prop, value);
            }
            records.push(record);
        }
        self.report.classes = records.len();
        let ontology_iri = self
            .ontology_iri
            .or(self.base)
            .unwrap_or_default();
        let snapshot = OntologySnapshot::new(ontology_iri, OWL_THING, records)?;
        Ok((snapshot, self.report))
    }
}
