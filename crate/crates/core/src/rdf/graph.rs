use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{BlankNode, Iri, RdfError, Subject, Term, Triple};

/// Prefix label to namespace bindings. A label maps to exactly one
/// namespace; rebinding it to a different one is an error.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrefixMap(BTreeMap<String, Iri>);

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: impl Into<String>, namespace: Iri) -> Result<(), RdfError> {
        let label = label.into();
        match self.0.get(&label) {
            Some(existing) if *existing != namespace => Err(RdfError::PrefixConflict {
                label,
                first: existing.as_str().to_string(),
                second: namespace.as_str().to_string(),
            }),
            Some(_) => Ok(()),
            None => {
                self.0.insert(label, namespace);
                Ok(())
            }
        }
    }

    /// Binds `label`, replacing any earlier binding. Used by parsers, where
    /// a later `@prefix` legally shadows an earlier one.
    pub(crate) fn rebind(&mut self, label: String, namespace: Iri) {
        self.0.insert(label, namespace);
    }

    pub fn get(&self, label: &str) -> Option<&Iri> {
        self.0.get(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Iri)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn merge(&mut self, other: &PrefixMap) -> Result<(), RdfError> {
        for (label, ns) in other.iter() {
            self.insert(label, ns.clone())?;
        }
        Ok(())
    }

    /// Expands `prefix:local` using the bindings.
    pub fn expand(&self, curie: &str) -> Option<Result<Iri, RdfError>> {
        let (prefix, local) = curie.split_once(':')?;
        let ns = self.get(prefix)?;
        Some(ns.join(local))
    }

    /// The longest namespace that `iri` starts with, with its label.
    pub fn best_match<'a>(&'a self, iri: &'a Iri) -> Option<(&'a str, &'a str)> {
        self.0
            .iter()
            .filter(|(_, ns)| iri.as_str().starts_with(ns.as_str()))
            .max_by_key(|(_, ns)| ns.as_str().len())
            .map(|(label, ns)| (label.as_str(), &iri.as_str()[ns.as_str().len()..]))
    }
}

/// A set of triples plus the prefix bindings used to read or write it.
///
/// Equality (`==`) compares triple sets only; prefixes are presentation.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    triples: BTreeSet<Triple>,
    prefixes: PrefixMap,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.triples == other.triples
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_prefixes(prefixes: PrefixMap) -> Self {
        Graph {
            triples: BTreeSet::new(),
            prefixes,
        }
    }

    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        self.triples.remove(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Triples in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn prefixes(&self) -> &PrefixMap {
        &self.prefixes
    }

    pub fn prefixes_mut(&mut self) -> &mut PrefixMap {
        &mut self.prefixes
    }

    pub fn has_blank_nodes(&self) -> bool {
        self.triples.iter().any(Triple::has_blank_node)
    }

    /// All triples matching the bound positions, in canonical order.
    /// `None` is a wildcard.
    pub fn match_pattern(
        &self,
        subject: Option<&Subject>,
        predicate: Option<&Iri>,
        object: Option<&Term>,
    ) -> Vec<&Triple> {
        self.triples
            .iter()
            .filter(|t| subject.is_none_or(|s| *s == t.subject))
            .filter(|t| predicate.is_none_or(|p| *p == t.predicate))
            .filter(|t| object.is_none_or(|o| *o == t.object))
            .collect()
    }

    /// Objects of `(subject, predicate, ?)`.
    pub fn objects<'a>(
        &'a self,
        subject: &'a Subject,
        predicate: &'a Iri,
    ) -> impl Iterator<Item = &'a Term> + 'a {
        self.triples
            .iter()
            .filter(move |t| t.subject == *subject && t.predicate == *predicate)
            .map(|t| &t.object)
    }

    /// Subjects of `(?, predicate, object)`.
    pub fn subjects<'a>(
        &'a self,
        predicate: &'a Iri,
        object: &'a Term,
    ) -> impl Iterator<Item = &'a Subject> + 'a {
        self.triples
            .iter()
            .filter(move |t| t.predicate == *predicate && t.object == *object)
            .map(|t| &t.subject)
    }

    pub fn into_triples(self) -> BTreeSet<Triple> {
        self.triples
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        self.triples.extend(iter);
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Graph {
            triples: iter.into_iter().collect(),
            prefixes: PrefixMap::new(),
        }
    }
}

/// Set equality of two skolemized graphs. Prefix maps are ignored.
pub fn graphs_equal(a: &Graph, b: &Graph) -> Result<bool, RdfError> {
    for g in [a, b] {
        if let Some(t) = g.iter().find(|t| t.has_blank_node()) {
            let label = match (&t.subject, &t.object) {
                (Subject::Blank(b), _) => b.label().to_string(),
                (_, Term::Blank(b)) => b.label().to_string(),
                _ => unreachable!(),
            };
            return Err(RdfError::BlankNodePresent(label));
        }
    }
    Ok(a.triples == b.triples)
}

/// Union of two graphs. Prefix bindings are merged; a label bound to
/// two different namespaces is a conflict.
pub fn merge_graphs(a: &Graph, b: &Graph) -> Result<Graph, RdfError> {
    let mut prefixes = a.prefixes.clone();
    prefixes.merge(&b.prefixes)?;
    let mut triples = a.triples.clone();
    triples.extend(b.triples.iter().cloned());
    Ok(Graph { triples, prefixes })
}

/// Replaces every blank node with `<base>genid/<n>`, where `n` is the
/// index of the node's first occurrence when the graph is walked in
/// canonical order (subject before object).
pub fn skolemize(g: &Graph, base: &Iri) -> Result<Graph, RdfError> {
    let mut mapping: HashMap<BlankNode, Iri> = HashMap::new();
    let mut next = 0usize;
    let mut mint =
        |b: &BlankNode, mapping: &mut HashMap<BlankNode, Iri>| -> Result<Iri, RdfError> {
            if let Some(iri) = mapping.get(b) {
                return Ok(iri.clone());
            }
            let iri = base.join(&format!("genid/{next}"))?;
            next += 1;
            mapping.insert(b.clone(), iri.clone());
            Ok(iri)
        };
    let mut out = Graph::with_prefixes(g.prefixes.clone());
    for t in &g.triples {
        let subject = match &t.subject {
            Subject::Blank(b) => Subject::Iri(mint(b, &mut mapping)?),
            s => s.clone(),
        };
        let object = match &t.object {
            Term::Blank(b) => Term::Iri(mint(b, &mut mapping)?),
            o => o.clone(),
        };
        out.insert(Triple {
            subject,
            predicate: t.predicate.clone(),
            object,
        });
    }
    Ok(out)
}
