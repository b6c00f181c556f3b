use std::fmt::Write as _;

use super::term::escape_literal_into;
use super::vocab::{rdf, xsd};
use super::{Graph, Iri, Literal, PrefixMap, RdfFormat, Subject, Term};

/// Serializes `g`. N-Triples output is one sorted line per triple;
/// Turtle output groups by subject and abbreviates with the graph's
/// prefixes. Both are pure functions of the triple set and prefix map.
pub fn serialize_graph(g: &Graph, format: RdfFormat) -> String {
    match format {
        RdfFormat::NTriples => to_ntriples(g),
        RdfFormat::Turtle => to_turtle(g),
    }
}

fn to_ntriples(g: &Graph) -> String {
    let mut out = String::new();
    for t in g.iter() {
        let _ = writeln!(out, "{t}");
    }
    out
}

fn is_pn_prefix(label: &str) -> bool {
    label.is_empty()
        || (label.starts_with(|c: char| c.is_ascii_alphabetic())
            && !label.ends_with('.')
            && label
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.')))
}

fn is_pn_local(local: &str) -> bool {
    !local.is_empty()
        && local.starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_')
        && !local.ends_with('.')
        && local
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && !local.contains("..")
}

fn write_iri(out: &mut String, iri: &Iri, prefixes: &PrefixMap) {
    if iri == &rdf::type_() {
        out.push('a');
        return;
    }
    write_iri_plain(out, iri, prefixes);
}

fn write_iri_plain(out: &mut String, iri: &Iri, prefixes: &PrefixMap) {
    match prefixes.best_match(iri) {
        Some((label, local)) if is_pn_prefix(label) && is_pn_local(local) => {
            let _ = write!(out, "{label}:{local}");
        }
        _ => {
            let _ = write!(out, "{iri}");
        }
    }
}

fn write_literal(out: &mut String, lit: &Literal, prefixes: &PrefixMap) {
    out.push('"');
    escape_literal_into(lit.lexical(), out);
    out.push('"');
    if let Some(lang) = lit.lang() {
        out.push('@');
        out.push_str(lang);
    } else if lit.datatype() != &xsd::string() {
        out.push_str("^^");
        write_iri_plain(out, lit.datatype(), prefixes);
    }
}

fn write_term(out: &mut String, term: &Term, prefixes: &PrefixMap) {
    match term {
        Term::Iri(iri) => write_iri_plain(out, iri, prefixes),
        Term::Literal(lit) => write_literal(out, lit, prefixes),
        Term::Blank(b) => {
            let _ = write!(out, "{b}");
        }
    }
}

fn write_subject(out: &mut String, s: &Subject, prefixes: &PrefixMap) {
    match s {
        Subject::Iri(iri) => write_iri_plain(out, iri, prefixes),
        Subject::Blank(b) => {
            let _ = write!(out, "{b}");
        }
    }
}

fn to_turtle(g: &Graph) -> String {
    let prefixes = g.prefixes();
    let mut out = String::new();
    for (label, ns) in prefixes.iter() {
        if is_pn_prefix(label) {
            let _ = writeln!(out, "@prefix {label}: {ns} .");
        }
    }
    // Only usable prefixes may be used for abbreviation.
    let mut usable = PrefixMap::new();
    for (label, ns) in prefixes.iter().filter(|(l, _)| is_pn_prefix(l)) {
        let _ = usable.insert(label, ns.clone());
    }

    let triples: Vec<_> = g.iter().collect();
    let mut i = 0;
    while i < triples.len() {
        let subject = &triples[i].subject;
        let mut j = i;
        while j < triples.len() && triples[j].subject == *subject {
            j += 1;
        }
        let group = &triples[i..j];
        // rdf:type first, then the remaining predicates in canonical order.
        let type_iri = rdf::type_();
        let mut predicates: Vec<&Iri> = Vec::new();
        if group.iter().any(|t| t.predicate == type_iri) {
            predicates.push(
                &group
                    .iter()
                    .find(|t| t.predicate == type_iri)
                    .unwrap()
                    .predicate,
            );
        }
        for t in group {
            if t.predicate != type_iri && predicates.last() != Some(&&t.predicate) {
                predicates.push(&t.predicate);
            }
        }

        out.push('\n');
        write_subject(&mut out, subject, &usable);
        for (n, predicate) in predicates.iter().enumerate() {
            out.push_str(if n == 0 { " " } else { " ;\n    " });
            write_iri(&mut out, predicate, &usable);
            let objects = group.iter().filter(|t| &t.predicate == *predicate);
            for (k, t) in objects.enumerate() {
                out.push_str(if k == 0 { " " } else { ", " });
                write_term(&mut out, &t.object, &usable);
            }
        }
        out.push_str(" .\n");
        i = j;
    }
    out
}
