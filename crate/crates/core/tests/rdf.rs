mod common;

use std::collections::BTreeSet;

use chad_core::rdf::{
    graphs_equal, merge_graphs, parse_str, read_graph_file, serialize_graph, skolemize, Iri,
    RdfError, RdfFormat, Subject,
};
use common::*;
use proptest::prelude::*;

fn oxttl_lines(path: &std::path::Path) -> BTreeSet<String> {
    let bytes = std::fs::read(path).unwrap();
    let is_nt = path.extension().is_some_and(|x| x == "nt");
    let triples: Vec<String> = if is_nt {
        oxttl::NTriplesParser::new()
            .for_slice(&bytes)
            .map(|t| t.unwrap().to_string())
            .collect()
    } else {
        oxttl::TurtleParser::new()
            .for_slice(&bytes)
            .map(|t| t.unwrap().to_string())
            .collect()
    };
    triples.into_iter().collect()
}

#[test]
fn agrees_with_reference_parser_on_fixtures() {
    let files = fixture_graph_files();
    assert!(files.len() > 10);
    for f in files {
        let ours = read_graph_file(&f).unwrap();
        let theirs = oxttl_lines(&f);
        assert_eq!(ours.len(), theirs.len(), "{}", f.display());
        if !ours.has_blank_nodes() {
            let nt: BTreeSet<String> = serialize_graph(&ours, RdfFormat::NTriples)
                .lines()
                .map(|l| l.trim_end_matches(" .").to_string())
                .collect();
            assert_eq!(nt, theirs, "{}", f.display());
        }
    }
}

#[test]
fn fixture_graphs_round_trip() {
    for f in fixture_graph_files() {
        let g = read_graph_file(&f).unwrap();
        for fmt in [RdfFormat::Turtle, RdfFormat::NTriples] {
            let back = parse_str(&serialize_graph(&g, fmt), fmt).unwrap();
            if g.has_blank_nodes() {
                assert_eq!(back.len(), g.len());
            } else {
                assert!(graphs_equal(&g, &back).unwrap(), "{} {fmt}", f.display());
            }
        }
    }
}

#[test]
fn blank_nodes_need_skolemizing() {
    let g = read_graph_file(&fixtures().join("blank_nodes.ttl")).unwrap();
    assert!(matches!(
        graphs_equal(&g, &g),
        Err(RdfError::BlankNodePresent(_))
    ));
    let base = Iri::new("https://example.org/chad/.well-known/genid/").unwrap();
    let s = skolemize(&g, &base).unwrap();
    assert_eq!(s.len(), g.len());
    assert!(!s.has_blank_nodes());
    let minted: BTreeSet<&Subject> = s.iter().map(|t| &t.subject).collect();
    assert_eq!(minted.len(), 3);
    assert!(graphs_equal(&s, &skolemize(&g, &base).unwrap()).unwrap());
}

#[test]
fn serialization_is_deterministic() {
    let g = read_graph_file(&fixtures().join("exemplar.ttl")).unwrap();
    for fmt in [RdfFormat::Turtle, RdfFormat::NTriples] {
        assert_eq!(serialize_graph(&g, fmt), serialize_graph(&g.clone(), fmt));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn round_trip_both_formats(g in arb::graph()) {
        for fmt in [RdfFormat::Turtle, RdfFormat::NTriples] {
            let text = serialize_graph(&g, fmt);
            let back = parse_str(&text, fmt).unwrap();
            prop_assert!(graphs_equal(&g, &back).unwrap(), "{}", text);
        }
    }

    #[test]
    fn reference_parser_reads_our_output(g in arb::graph()) {
        let text = serialize_graph(&g, RdfFormat::Turtle);
        let n = oxttl::TurtleParser::new().for_slice(text.as_bytes()).collect::<Result<Vec<_>, _>>().unwrap().len();
        prop_assert_eq!(n, g.len());
    }

    #[test]
    fn ntriples_line_order_is_irrelevant(g in arb::graph(), seed in any::<u64>()) {
        let text = serialize_graph(&g, RdfFormat::NTriples);
        let mut lines: Vec<&str> = text.lines().collect();
        let n = lines.len().max(1) as u64;
        for i in 0..lines.len() {
            let j = ((seed.wrapping_mul(i as u64 + 7)) % n) as usize;
            lines.swap(i, j);
        }
        let back = parse_str(&lines.join("\n"), RdfFormat::NTriples).unwrap();
        prop_assert!(graphs_equal(&g, &back).unwrap());
    }

    #[test]
    fn merge_is_commutative_and_associative(a in arb::graph(), b in arb::graph(), c in arb::graph()) {
        let ab = merge_graphs(&a, &b).unwrap();
        prop_assert!(graphs_equal(&ab, &merge_graphs(&b, &a).unwrap()).unwrap());
        let left = merge_graphs(&ab, &c).unwrap();
        let right = merge_graphs(&a, &merge_graphs(&b, &c).unwrap()).unwrap();
        prop_assert!(graphs_equal(&left, &right).unwrap());
        prop_assert!(ab.len() <= a.len() + b.len());
        for t in a.iter().chain(b.iter()) {
            prop_assert!(ab.contains(t));
        }
    }
}
