//! Application-profile extraction from source ontologies and the
//! source-consistency gate.

mod consistency;
mod manifest;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::rdf::vocab::{self, rdfs};
use crate::rdf::{read_graph_file, Graph, Iri, PrefixMap, RdfError, Subject, Term, Triple};

pub use consistency::{check_consistency, rdfs_ancestors};
pub use manifest::{Category, ProfileStats, SelectedTerm, SourceDecl, TermManifest};

#[derive(Debug, thiserror::Error)]
pub enum ProfileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error("term {0} is listed more than once")]
    DuplicateTerm(Iri),
    #[error("term {term} refers to undeclared source '{source_id}'")]
    UnknownSource { term: Iri, source_id: String },
    #[error("term {term} is outside its source namespace {namespace}")]
    NamespaceMismatch { term: Iri, namespace: Iri },
    #[error("source '{source_id}' is bound to both {first} and {second}")]
    SourceConflict {
        source_id: String,
        first: Iri,
        second: Iri,
    },
    #[error("source '{source_id}' unavailable at {path}: {reason}")]
    SourceUnavailable {
        source_id: String,
        path: PathBuf,
        reason: String,
    },
    #[error("source '{source_id}': {error}")]
    SourceSyntax { source_id: String, error: RdfError },
    #[error("terms missing from their sources: {}", join_iris(.0))]
    MissingInSource(Vec<Iri>),
}

fn join_iris(iris: &[Iri]) -> String {
    iris.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FindingKind {
    ForeignSubsumption,
    DomainNarrowed,
    RangeNarrowed,
    MissingInSource,
    DanglingReference,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ConsistencyFinding {
    pub term: Iri,
    pub kind: FindingKind,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for ConsistencyFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}: {:?} {}: {}", self.kind, self.term, self.message)
    }
}

/// An extracted profile: the standalone ontology graph plus the
/// category of each selected term and the extraction warnings.
#[derive(Clone, Debug, Default)]
pub struct ProfileGraph {
    pub graph: Graph,
    pub terms: BTreeMap<Iri, Category>,
    pub warnings: Vec<ConsistencyFinding>,
}

impl ProfileGraph {
    pub fn stats(&self) -> ProfileStats {
        profile_stats(self)
    }

    pub fn classes(&self) -> BTreeSet<Iri> {
        self.of(Category::Class)
    }

    pub fn properties(&self) -> BTreeSet<Iri> {
        let mut p = self.of(Category::ObjectProperty);
        p.extend(self.of(Category::DataProperty));
        p
    }

    fn of(&self, cat: Category) -> BTreeSet<Iri> {
        self.terms
            .iter()
            .filter(|(_, c)| **c == cat)
            .map(|(i, _)| i.clone())
            .collect()
    }
}

/// Parses every declared source, resolving relative paths against `root`.
pub fn load_sources(
    manifest: &TermManifest,
    root: &Path,
) -> Result<BTreeMap<String, Graph>, ProfileError> {
    let mut out = BTreeMap::new();
    for (id, decl) in &manifest.sources {
        let path = root.join(&decl.path);
        if !path.is_file() {
            return Err(ProfileError::SourceUnavailable {
                source_id: id.clone(),
                path,
                reason: "no such file".into(),
            });
        }
        let g = read_graph_file(&path).map_err(|error| match error {
            RdfError::Io(e) => ProfileError::SourceUnavailable {
                source_id: id.clone(),
                path: path.clone(),
                reason: e.to_string(),
            },
            error => ProfileError::SourceSyntax {
                source_id: id.clone(),
                error,
            },
        })?;
        out.insert(id.clone(), g);
    }
    Ok(out)
}

fn is_builtin(iri: &Iri) -> bool {
    vocab::is_meta_term(iri)
}

fn dangling(term: &Iri, message: String) -> ConsistencyFinding {
    ConsistencyFinding {
        term: term.clone(),
        kind: FindingKind::DanglingReference,
        severity: Severity::Warning,
        message,
    }
}

/// Copies the selected terms with their minimal axioms and a provenance
/// annotation each. Axioms that would mention an unselected term are
/// dropped and reported as warnings.
pub fn extract_profile(
    manifest: &TermManifest,
    sources: &BTreeMap<String, Graph>,
) -> Result<ProfileGraph, ProfileError> {
    let selected = manifest.term_set();
    let mut missing = Vec::new();
    for (_, t) in manifest.terms() {
        let subject = Subject::Iri(t.iri.clone());
        let present = sources
            .get(&t.source)
            .is_some_and(|g| !g.match_pattern(Some(&subject), None, None).is_empty());
        if !present {
            missing.push(t.iri.clone());
        }
    }
    if !missing.is_empty() {
        missing.sort();
        return Err(ProfileError::MissingInSource(missing));
    }

    let mut prefixes = PrefixMap::new();
    for (label, ns) in vocab::standard_prefixes() {
        prefixes.insert(label, Iri::new(ns).expect("static namespace"))?;
    }
    for (id, decl) in &manifest.sources {
        if prefixes.get(id).is_none() {
            prefixes.insert(id.clone(), decl.namespace.clone())?;
        }
    }
    let mut graph = Graph::with_prefixes(prefixes);
    let mut terms = BTreeMap::new();
    let mut warnings = Vec::new();
    let is_selected = |t: &Term| t.as_iri().is_some_and(|i| selected.contains(i));

    for (cat, t) in manifest.terms() {
        terms.insert(t.iri.clone(), cat);
        let source = &sources[&t.source];
        let subject = Subject::Iri(t.iri.clone());
        for triple in source.match_pattern(Some(&subject), None, None) {
            let p = &triple.predicate;
            let o = &triple.object;
            let keep = if *p == vocab::rdf::type_() {
                o.as_iri().is_some_and(is_builtin) || is_selected(o)
            } else if *p == rdfs::label() || *p == rdfs::comment() {
                true
            } else if *p == rdfs::sub_class_of() || *p == rdfs::sub_property_of() {
                is_selected(o)
            } else if *p == rdfs::domain() || *p == rdfs::range() {
                is_selected(o) || o.as_iri().is_some_and(is_builtin)
            } else {
                continue;
            };
            if keep {
                graph.insert(triple.clone());
            } else {
                warnings.push(dangling(
                    &t.iri,
                    format!("dropped axiom {triple} mentioning an unselected term"),
                ));
            }
        }
        let ns = manifest.sources[&t.source].namespace.clone();
        graph.insert(Triple::new(t.iri.clone(), rdfs::is_defined_by(), ns));
    }

    // Unselected properties that would connect two selected classes.
    let classes = manifest.category_set(Category::Class);
    let mut seen = BTreeSet::new();
    for g in sources.values() {
        for triple in g.match_pattern(None, Some(&rdfs::domain()), None) {
            let Some(p) = triple.subject.as_iri() else {
                continue;
            };
            if selected.contains(p) || !seen.insert(p.clone()) {
                continue;
            }
            let Some(d) = triple.object.as_iri().filter(|d| classes.contains(*d)) else {
                continue;
            };
            let subject = Subject::Iri(p.clone());
            let range = sources
                .values()
                .flat_map(|g| {
                    g.objects(&subject, &rdfs::range())
                        .cloned()
                        .collect::<Vec<_>>()
                })
                .find_map(|r| r.as_iri().filter(|r| classes.contains(*r)).cloned());
            if let Some(r) = range {
                warnings.push(dangling(
                    p,
                    format!("unselected property links selected classes {d} and {r}; not emitted"),
                ));
            }
        }
    }
    warnings.sort();
    warnings.dedup();
    Ok(ProfileGraph {
        graph,
        terms,
        warnings,
    })
}

/// Vocabulary terms used by `g` that the manifest does not declare:
/// predicates, `rdf:type` objects, and any IRI inside a declared source
/// namespace. Terms of the modelling languages are exempt.
pub fn undeclared_terms(g: &Graph, manifest: &TermManifest) -> BTreeSet<Iri> {
    let declared = manifest.term_set();
    let namespaces: Vec<&Iri> = manifest.sources.values().map(|s| &s.namespace).collect();
    let in_source = |i: &Iri| {
        namespaces
            .iter()
            .any(|ns| i.as_str().starts_with(ns.as_str()))
    };
    let type_ = vocab::rdf::type_();
    let mut used = BTreeSet::new();
    for t in g.iter() {
        used.insert(&t.predicate);
        if let Some(s) = t.subject.as_iri().filter(|s| in_source(s)) {
            used.insert(s);
        }
        if let Term::Iri(o) = &t.object {
            if t.predicate == type_ || in_source(o) {
                used.insert(o);
            }
        }
    }
    used.into_iter()
        .filter(|i| !is_builtin(i) && !declared.contains(*i))
        .cloned()
        .collect()
}

/// Counts of distinct selected terms per category.
pub fn profile_stats(profile: &ProfileGraph) -> ProfileStats {
    let mut s = ProfileStats::default();
    for cat in profile.terms.values() {
        match cat {
            Category::Class => s.classes += 1,
            Category::ObjectProperty => s.object_properties += 1,
            Category::DataProperty => s.data_properties += 1,
            Category::Individual => s.individuals += 1,
        }
    }
    s
}

impl From<RdfError> for ProfileError {
    fn from(e: RdfError) -> Self {
        ProfileError::Manifest(e.to_string())
    }
}
