use std::collections::{BTreeMap, BTreeSet};

use super::{ConsistencyFinding, FindingKind, ProfileGraph, Severity};
use crate::rdf::vocab::rdfs;
use crate::rdf::{Graph, Iri, Subject, Term};

/// Reflexive-transitive closure of `predicate` over `g`:
/// maps each subject to every node reachable from it.
pub fn rdfs_ancestors(g: &Graph, predicate: &Iri) -> BTreeMap<Iri, BTreeSet<Iri>> {
    let mut direct: BTreeMap<Iri, Vec<Iri>> = BTreeMap::new();
    for t in g.match_pattern(None, Some(predicate), None) {
        if let (Some(s), Some(o)) = (t.subject.as_iri(), t.object.as_iri()) {
            direct.entry(s.clone()).or_default().push(o.clone());
        }
    }
    let mut out = BTreeMap::new();
    for start in direct.keys() {
        let mut seen = BTreeSet::from([start.clone()]);
        let mut stack = vec![start.clone()];
        while let Some(n) = stack.pop() {
            for next in direct.get(&n).into_iter().flatten() {
                if seen.insert(next.clone()) {
                    stack.push(next.clone());
                }
            }
        }
        out.insert(start.clone(), seen);
    }
    out
}

fn error(term: &Iri, kind: FindingKind, message: String) -> ConsistencyFinding {
    ConsistencyFinding {
        term: term.clone(),
        kind,
        severity: Severity::Error,
        message,
    }
}

/// Compares a profile against the RDFS closure of its sources. An empty
/// result means every profile axiom is entailed by, or copied from, the
/// sources.
pub fn check_consistency(
    profile: &ProfileGraph,
    sources: &BTreeMap<String, Graph>,
) -> Vec<ConsistencyFinding> {
    let mut union = Graph::new();
    for g in sources.values() {
        union.extend(g.iter().cloned());
    }
    let sub_class = rdfs_ancestors(&union, &rdfs::sub_class_of());
    let sub_prop = rdfs_ancestors(&union, &rdfs::sub_property_of());
    let known: BTreeSet<&Subject> = union.iter().map(|t| &t.subject).collect();

    let mut findings = Vec::new();
    let mut subjects = BTreeSet::new();
    for t in profile.graph.iter() {
        let Some(s) = t.subject.as_iri() else {
            continue;
        };
        if !known.contains(&t.subject) && subjects.insert(s.clone()) {
            findings.push(error(
                s,
                FindingKind::MissingInSource,
                "not defined by any source".into(),
            ));
        }
        let Term::Iri(o) = &t.object else { continue };
        let p = &t.predicate;
        if *p == rdfs::sub_class_of() || *p == rdfs::sub_property_of() {
            let closure = if *p == rdfs::sub_class_of() {
                &sub_class
            } else {
                &sub_prop
            };
            let entailed = closure.get(s).is_some_and(|a| a.contains(o)) || s == o;
            if !entailed {
                findings.push(error(
                    s,
                    FindingKind::ForeignSubsumption,
                    format!("{s} ⊑ {o} is not entailed by the sources"),
                ));
            }
        } else if (*p == rdfs::domain() || *p == rdfs::range()) && !union.contains(t) {
            let (kind, what) = if *p == rdfs::domain() {
                (FindingKind::DomainNarrowed, "domain")
            } else {
                (FindingKind::RangeNarrowed, "range")
            };
            let declared: Vec<String> = union
                .objects(&t.subject, p)
                .map(|x| x.to_string())
                .collect();
            findings.push(error(
                s,
                kind,
                format!(
                    "{what} {o} differs from source {what} [{}]",
                    declared.join(", ")
                ),
            ));
        }
    }
    findings.sort();
    findings
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{parse_str, RdfFormat};

    #[test]
    fn closure_is_transitive() {
        let g = parse_str(
            "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n\
             <http://e/a> rdfs:subClassOf <http://e/b> . <http://e/b> rdfs:subClassOf <http://e/c> .",
            RdfFormat::Turtle,
        )
        .unwrap();
        let c = rdfs_ancestors(&g, &rdfs::sub_class_of());
        let a = Iri::new("http://e/a").unwrap();
        assert!(c[&a].contains(&Iri::new("http://e/c").unwrap()));
        assert_eq!(c[&a].len(), 3);
    }
}
