mod common;

use chad_core::query::{
    compare_results, execute, parse_query, parse_tsv, Filter, FilterOp, OrderKey, PatternTerm,
    QueryError, TriplePattern,
};
use chad_core::rdf::{read_graph_file, Iri, Literal, PrefixMap, Term, Triple};
use chad_core::{Graph, Query};
use common::*;
use proptest::prelude::*;

fn load(path: &std::path::Path) -> Query {
    parse_query(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn eight_shipped_questions() {
    assert_eq!(shipped_queries().len(), 8);
}

#[test]
fn shipped_questions_match_expected_on_exemplar() {
    let g = read_graph_file(&fixtures().join("exemplar.ttl")).unwrap();
    for (q, tsv) in shipped_queries() {
        let query = load(&q);
        let expected = parse_tsv(&std::fs::read_to_string(&tsv).unwrap()).unwrap();
        assert!(!expected.rows.is_empty(), "{}", q.display());
        assert_eq!(
            brute_force(&query, &g),
            expected,
            "oracle vs frozen {}",
            q.display()
        );
        let diff = compare_results(&execute(&query, &g), &expected, !query.order_by.is_empty());
        assert!(diff.is_empty(), "{}: {}", q.display(), diff.to_text());
    }
}

#[test]
fn shipped_questions_match_oracle_on_bundle_data() {
    for (q, _) in shipped_queries() {
        let data = q.parent().unwrap().parent().unwrap().join("data.ttl");
        let g = read_graph_file(&data).unwrap();
        let query = load(&q);
        assert_eq!(
            execute(&query, &g),
            brute_force(&query, &g),
            "{}",
            q.display()
        );
    }
}

#[test]
fn diff_reports_missing_surplus_and_order() {
    let g = read_graph_file(&fixtures().join("exemplar.ttl")).unwrap();
    let (q, tsv) = &shipped_queries()[0];
    let query = load(q);
    let expected = parse_tsv(&std::fs::read_to_string(tsv).unwrap()).unwrap();
    let mut actual = execute(&query, &g);
    actual.rows.reverse();
    let d = compare_results(&actual, &expected, true);
    assert!(d.order_mismatch && d.missing.is_empty() && d.surplus.is_empty());
    assert!(compare_results(&actual, &expected, false).is_empty());
    actual.rows.pop();
    actual.rows.push(vec![
        Term::Iri(Iri::new("urn:x").unwrap()),
        Term::Literal(Literal::string("x")),
    ]);
    let d = compare_results(&actual, &expected, false);
    assert_eq!((d.missing.len(), d.surplus.len()), (1, 1));
    assert!(!d.to_text().is_empty());
    let mut wrong_header = expected.clone();
    wrong_header.header[0] = "other".into();
    assert!(compare_results(&expected, &wrong_header, false)
        .header_mismatch
        .is_some());
}

#[test]
fn tsv_round_trip_and_errors() {
    let (_, tsv) = &shipped_queries()[1];
    let text = std::fs::read_to_string(tsv).unwrap();
    assert_eq!(parse_tsv(&text).unwrap().to_tsv(), text);
    assert!(matches!(
        parse_tsv("?a\t?b\n<urn:x>\n"),
        Err(QueryError::ExpectedFileMalformed { line: 2, .. })
    ));
    assert!(matches!(
        parse_tsv("a\n<urn:x>\n"),
        Err(QueryError::ExpectedFileMalformed { line: 1, .. })
    ));
    assert!(matches!(
        parse_tsv("?a\nnot-a-term\n"),
        Err(QueryError::ExpectedFileMalformed { line: 2, .. })
    ));
}

#[test]
fn syntax_errors_and_unbound_variables() {
    assert!(matches!(
        parse_query("SELECT ?x WHERE { ?x ?y }"),
        Err(QueryError::Syntax { .. })
    ));
    assert!(matches!(
        parse_query("SELECT ?z WHERE { ?x ?y ?w . }"),
        Err(QueryError::UnboundVariable(v)) if v == "z"
    ));
    assert!(matches!(
        parse_query("SELECT ?x WHERE { ?x a ex:C . }"),
        Err(QueryError::Syntax { .. })
    ));
}

#[test]
fn empty_graph_gives_header_only() {
    let (q, _) = &shipped_queries()[0];
    let r = execute(&load(q), &Graph::new());
    assert!(r.rows.is_empty());
    assert_eq!(r.to_tsv(), "?work\t?text\n");
}

const VARS: [&str; 3] = ["a", "b", "c"];

fn node(i: u8) -> Term {
    Term::Iri(Iri::new(format!("urn:n:{i}")).unwrap())
}

fn pred(i: u8) -> Iri {
    Iri::new(format!("urn:p:{i}")).unwrap()
}

fn arb_graph() -> impl Strategy<Value = Graph> {
    let obj = prop_oneof![
        (0u8..5).prop_map(node),
        prop::sample::select(vec!["x", "xy", "yz"]).prop_map(|s| Term::Literal(Literal::string(s))),
    ];
    prop::collection::vec((0u8..5, 0u8..3, obj), 0..40).prop_map(|ts| {
        let mut g = Graph::new();
        for (s, p, o) in ts {
            let Term::Iri(s) = node(s) else {
                unreachable!()
            };
            g.insert(Triple::new(s, pred(p), o));
        }
        g
    })
}

fn arb_slot(term: BoxedStrategy<Term>) -> impl Strategy<Value = PatternTerm> {
    prop_oneof![
        2 => prop::sample::select(VARS.to_vec()).prop_map(|v| PatternTerm::Var(v.into())),
        1 => term.prop_map(PatternTerm::Term),
    ]
}

fn arb_query() -> impl Strategy<Value = Query> {
    let pattern = (
        arb_slot((0u8..5).prop_map(node).boxed()),
        arb_slot((0u8..3).prop_map(|p| Term::Iri(pred(p))).boxed()),
        arb_slot(
            prop_oneof![
                (0u8..5).prop_map(node),
                Just(Term::Literal(Literal::string("xy")))
            ]
            .boxed(),
        ),
    )
        .prop_map(|(s, p, o)| TriplePattern { s, p, o });
    (
        prop::collection::vec(pattern, 1..4),
        any::<bool>(),
        any::<(bool, bool)>(),
        any::<u8>(),
        prop::option::of(prop_oneof![
            Just(FilterOp::Contains {
                value: "y".into(),
                on_str: false
            }),
            Just(FilterOp::Contains {
                value: "n:1".into(),
                on_str: true
            }),
            Just(FilterOp::Equals(node(2))),
        ]),
    )
        .prop_map(|(patterns, distinct, (order, desc), pick, filter)| {
            let mut used: Vec<String> = Vec::new();
            for p in &patterns {
                for t in [&p.s, &p.p, &p.o] {
                    if let PatternTerm::Var(v) = t {
                        if !used.contains(v) {
                            used.push(v.clone());
                        }
                    }
                }
            }
            let select: Vec<String> = used
                .iter()
                .enumerate()
                .filter(|(i, _)| pick & (1 << i) != 0 || *i == 0)
                .map(|(_, v)| v.clone())
                .collect();
            let first = used.first().cloned();
            Query {
                select,
                filters: match (filter, &first) {
                    (Some(op), Some(v)) => vec![Filter { var: v.clone(), op }],
                    _ => vec![],
                },
                order_by: match (&first, order) {
                    (Some(v), true) => vec![OrderKey {
                        var: v.clone(),
                        descending: desc,
                    }],
                    _ => vec![],
                },
                patterns,
                distinct,
                prefixes: PrefixMap::new(),
            }
        })
        .prop_filter("needs a variable", |q| !q.select.is_empty())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn engine_agrees_with_nested_loop_oracle(g in arb_graph(), q in arb_query()) {
        prop_assert_eq!(execute(&q, &g), brute_force(&q, &g));
    }
}
