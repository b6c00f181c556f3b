//! RDF data model, Turtle/N-Triples I/O and graph operations.

mod graph;
mod parser;
mod term;
pub mod vocab;
mod writer;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

pub use graph::{graphs_equal, merge_graphs, skolemize, Graph, PrefixMap};
pub(crate) use parser::read_turtle_term;
pub use parser::{parse_document, parse_ntriples_term, parse_str};
pub use term::{BlankNode, Iri, Literal, Subject, Term, Triple};
pub use writer::serialize_graph;

#[derive(Debug, thiserror::Error)]
pub enum RdfError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported Turtle feature at line {line}, column {column}: {feature}")]
    UnsupportedFeature {
        line: usize,
        column: usize,
        feature: String,
    },
    #[error("invalid IRI {0:?}")]
    InvalidIri(String),
    #[error("invalid blank node label {0:?}")]
    InvalidBlankNode(String),
    #[error("invalid language tag {0:?}")]
    InvalidLanguageTag(String),
    #[error("rdf:langString literal without a language tag")]
    LangStringWithoutTag,
    #[error("a literal cannot be used as a subject")]
    LiteralSubject,
    #[error("prefix '{label}' is bound to both <{first}> and <{second}>")]
    PrefixConflict {
        label: String,
        first: String,
        second: String,
    },
    #[error("graph contains blank node _:{0}; skolemize it before comparing")]
    BlankNodePresent(String),
    #[error("input is not valid UTF-8")]
    InvalidUtf8,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RdfFormat {
    #[default]
    Turtle,
    NTriples,
}

impl RdfFormat {
    /// Guesses the format from a file extension; anything that is not
    /// `.nt` is read as Turtle.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("nt") => RdfFormat::NTriples,
            _ => RdfFormat::Turtle,
        }
    }
}

impl FromStr for RdfFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "turtle" | "ttl" => Ok(RdfFormat::Turtle),
            "ntriples" | "n-triples" | "nt" => Ok(RdfFormat::NTriples),
            other => Err(format!(
                "unknown RDF format '{other}' (expected turtle or ntriples)"
            )),
        }
    }
}

impl fmt::Display for RdfFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RdfFormat::Turtle => "turtle",
            RdfFormat::NTriples => "ntriples",
        })
    }
}

/// Reads a graph from disk, picking the format from the extension.
pub fn read_graph_file(path: &Path) -> Result<Graph, RdfError> {
    let file = std::fs::File::open(path)?;
    parse_document(std::io::BufReader::new(file), RdfFormat::from_path(path))
}
