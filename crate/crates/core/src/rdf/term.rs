use std::cmp::Ordering;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use super::vocab::{rdf, xsd};
use super::RdfError;

/// An absolute IRI.
///
/// Ordering follows the canonical N-Triples text (`<...>`), so sorting
/// IRIs and sorting their serialized form agree byte for byte.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl AsRef<str>) -> Result<Self, RdfError> {
        let value = value.as_ref();
        if is_valid_iri(value) {
            Ok(Iri(Arc::from(value)))
        } else {
            Err(RdfError::InvalidIri(value.to_string()))
        }
    }

    /// For compile-time constants that are known to be valid.
    pub(crate) fn from_static(value: &'static str) -> Self {
        debug_assert!(is_valid_iri(value), "invalid IRI constant {value}");
        Iri(Arc::from(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Concatenates `suffix` onto this IRI, validating the result.
    pub fn join(&self, suffix: &str) -> Result<Iri, RdfError> {
        Iri::new(format!("{}{}", self.0, suffix))
    }
}

fn is_valid_iri(value: &str) -> bool {
    let Some(colon) = value.find(':') else {
        return false;
    };
    let scheme = &value[..colon];
    let mut chars = scheme.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
        return false;
    }
    !value.chars().any(|c| {
        c.is_whitespace()
            || c.is_control()
            || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
    })
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl Ord for Iri {
    fn cmp(&self, other: &Self) -> Ordering {
        // Compare as if both were wrapped in angle brackets.
        let a = self.0.bytes().chain(std::iter::once(b'>'));
        let b = other.0.bytes().chain(std::iter::once(b'>'));
        a.cmp(b)
    }
}

impl PartialOrd for Iri {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A labelled blank node, as found in parsed input.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlankNode(Arc<str>);

impl BlankNode {
    pub fn new(label: impl AsRef<str>) -> Result<Self, RdfError> {
        let label = label.as_ref();
        if label.is_empty()
            || !label
                .chars()
                .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
            || label.ends_with('.')
        {
            return Err(RdfError::InvalidBlankNode(label.to_string()));
        }
        Ok(BlankNode(Arc::from(label)))
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:{}", self.0)
    }
}

/// An RDF literal. Plain literals carry `xsd:string`; language-tagged
/// literals carry `rdf:langString` and a lowercase tag.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    lexical: Arc<str>,
    datatype: Iri,
    lang: Option<Arc<str>>,
}

impl Literal {
    pub fn string(lexical: impl AsRef<str>) -> Self {
        Literal {
            lexical: Arc::from(lexical.as_ref()),
            datatype: xsd::string(),
            lang: None,
        }
    }

    pub fn typed(lexical: impl AsRef<str>, datatype: Iri) -> Result<Self, RdfError> {
        if datatype == rdf::lang_string() {
            return Err(RdfError::LangStringWithoutTag);
        }
        Ok(Literal {
            lexical: Arc::from(lexical.as_ref()),
            datatype,
            lang: None,
        })
    }

    pub fn lang_tagged(lexical: impl AsRef<str>, lang: &str) -> Result<Self, RdfError> {
        let valid = !lang.is_empty()
            && lang
                .split('-')
                .all(|part| !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric()))
            && lang.chars().next().is_some_and(|c| c.is_ascii_alphabetic());
        if !valid {
            return Err(RdfError::InvalidLanguageTag(lang.to_string()));
        }
        Ok(Literal {
            lexical: Arc::from(lexical.as_ref()),
            datatype: rdf::lang_string(),
            lang: Some(Arc::from(lang.to_ascii_lowercase())),
        })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn lang(&self) -> Option<&str> {
        self.lang.as_deref()
    }

    fn write_canonical(&self, out: &mut String) {
        out.push('"');
        escape_literal_into(&self.lexical, out);
        out.push('"');
        if let Some(lang) = &self.lang {
            out.push('@');
            out.push_str(lang);
        } else if self.datatype != xsd::string() {
            out.push_str("^^");
            let _ = write!(out, "{}", self.datatype);
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::with_capacity(self.lexical.len() + 2);
        self.write_canonical(&mut s);
        f.write_str(&s)
    }
}

/// Escapes literal text for N-Triples: ECHAR for the usual controls,
/// uppercase `\uXXXX` for the rest of C0 and DEL, everything else verbatim.
pub(crate) fn escape_literal_into(text: &str, out: &mut String) {
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            c if (c as u32) < 0x20 || c as u32 == 0x7F => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
}

/// Subject position: an IRI or a blank node, never a literal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Subject {
    Iri(Iri),
    Blank(BlankNode),
}

impl Subject {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Subject::Iri(iri) => Some(iri),
            Subject::Blank(_) => None,
        }
    }
}

impl Ord for Subject {
    fn cmp(&self, other: &Self) -> Ordering {
        // '<' sorts before '_' in canonical text.
        match (self, other) {
            (Subject::Iri(a), Subject::Iri(b)) => a.cmp(b),
            (Subject::Blank(a), Subject::Blank(b)) => a.cmp(b),
            (Subject::Iri(_), Subject::Blank(_)) => Ordering::Less,
            (Subject::Blank(_), Subject::Iri(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Subject {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Iri(iri) => iri.fmt(f),
            Subject::Blank(b) => b.fmt(f),
        }
    }
}

impl From<Iri> for Subject {
    fn from(iri: Iri) -> Self {
        Subject::Iri(iri)
    }
}

impl From<BlankNode> for Subject {
    fn from(b: BlankNode) -> Self {
        Subject::Blank(b)
    }
}

/// Any RDF term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
    Blank(BlankNode),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank(_))
    }

    /// The term in subject form, if it can be one.
    pub fn to_subject(&self) -> Option<Subject> {
        match self {
            Term::Iri(iri) => Some(Subject::Iri(iri.clone())),
            Term::Blank(b) => Some(Subject::Blank(b.clone())),
            Term::Literal(_) => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Term::Literal(_) => 0,
            Term::Iri(_) => 1,
            Term::Blank(_) => 2,
        }
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Term::Iri(a), Term::Iri(b)) => a.cmp(b),
            (Term::Blank(a), Term::Blank(b)) => a.cmp(b),
            (Term::Literal(a), Term::Literal(b)) => {
                if a == b {
                    return Ordering::Equal;
                }
                let mut sa = String::new();
                let mut sb = String::new();
                a.write_canonical(&mut sa);
                b.write_canonical(&mut sb);
                sa.cmp(&sb)
            }
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => iri.fmt(f),
            Term::Literal(lit) => lit.fmt(f),
            Term::Blank(b) => b.fmt(f),
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

impl From<BlankNode> for Term {
    fn from(b: BlankNode) -> Self {
        Term::Blank(b)
    }
}

impl From<Subject> for Term {
    fn from(s: Subject) -> Self {
        match s {
            Subject::Iri(iri) => Term::Iri(iri),
            Subject::Blank(b) => Term::Blank(b),
        }
    }
}

/// A single RDF statement. Ordered by (subject, predicate, object)
/// canonical text.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Subject,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Subject>, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple {
            subject: subject.into(),
            predicate,
            object: object.into(),
        }
    }

    /// Builds a triple from a generic term in subject position.
    pub fn try_from_terms(subject: Term, predicate: Iri, object: Term) -> Result<Self, RdfError> {
        let subject = subject.to_subject().ok_or(RdfError::LiteralSubject)?;
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }

    pub fn has_blank_node(&self) -> bool {
        matches!(self.subject, Subject::Blank(_)) || self.object.is_blank()
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

impl serde::Serialize for Iri {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> serde::Deserialize<'de> for Iri {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(d)?;
        Iri::new(&s).map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl serde::Serialize for Subject {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
