mod common;

use std::collections::BTreeSet;

use chad_core::lowering::{key_segment, slug, Kind, LoweringError, ReferenceKind};
use chad_core::profile::undeclared_terms;
use chad_core::rdf::{read_graph_file, serialize_graph, RdfFormat};
use chad_core::{convert_dataset, TermManifest};
use common::*;
use proptest::prelude::*;

#[test]
fn triple_count_matches_tally() {
    let (o, p) = exemplar_records();
    assert_eq!(o.len(), 10);
    assert_eq!(p.len(), 6);
    let g = convert_exemplar(2);
    assert_eq!(g.len(), tally(&o, &p));
}

#[test]
fn tally_counts_each_record_kind() {
    let (o, p) = exemplar_records();
    let m = mapping();
    assert_eq!(convert_dataset(&o, &[], &m).unwrap().len(), tally(&o, &[]));
    let only_first = convert_dataset(&o[..1], &[], &m).unwrap();
    assert_eq!(only_first.len(), tally(&o[..1], &[]));
    assert_eq!(
        convert_dataset(&o, &p[..1], &m).unwrap().len(),
        tally(&o, &p[..1])
    );
}

#[test]
fn output_uses_only_manifest_terms() {
    let manifest = TermManifest::load(&fixtures().join("manifests/chad-ap.json")).unwrap();
    let g = convert_exemplar(1);
    assert_eq!(undeclared_terms(&g, &manifest), BTreeSet::new());
}

#[test]
fn serialization_independent_of_workers() {
    let a = serialize_graph(&convert_exemplar(1), RdfFormat::NTriples);
    let b = serialize_graph(&convert_exemplar(4), RdfFormat::NTriples);
    let c = serialize_graph(&convert_exemplar(4), RdfFormat::NTriples);
    assert_eq!(a, b);
    assert_eq!(b, c);
    let mut lines: Vec<&str> = a.lines().collect();
    lines.sort();
    assert_eq!(lines, a.lines().collect::<Vec<_>>());
}

#[test]
fn matches_frozen_exemplar() {
    let frozen = read_graph_file(&fixtures().join("exemplar.ttl")).unwrap();
    assert_eq!(convert_exemplar(3).into_triples(), frozen.into_triples());
}

#[test]
fn unresolved_depicts_reference() {
    let (mut o, p) = exemplar_records();
    o[1].depicts = vec!["mo-999".into()];
    match convert_dataset(&o, &p, &mapping()) {
        Err(LoweringError::UnresolvedReference { kind, key }) => {
            assert_eq!(kind, ReferenceKind::Depicts);
            assert_eq!(key, "mo-999");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unresolved_process_input() {
    let (o, mut p) = exemplar_records();
    p[2].input_data = Some("missing-cloud".into());
    assert!(matches!(
        convert_dataset(&o, &p, &mapping()),
        Err(LoweringError::UnresolvedReference {
            kind: ReferenceKind::InputData,
            ..
        })
    ));
}

#[test]
fn unresolved_process_object() {
    let (o, p) = exemplar_records();
    assert!(matches!(
        convert_dataset(&o[1..], &p, &mapping()),
        Err(LoweringError::UnresolvedReference {
            kind: ReferenceKind::ProcessObject,
            ..
        })
    ));
}

#[test]
fn mint_examples() {
    let m = mapping();
    assert_eq!(
        m.policy.mint(Kind::Item, "mo-001").as_str(),
        "https://example.org/chad/item/mo-001"
    );
    assert_eq!(
        m.policy
            .mint_role(Kind::Activity, "mo-001", "creation")
            .as_str(),
        "https://example.org/chad/activity/mo-001-creation"
    );
    assert_eq!(slug("Ulisse Aldrovandi"), "ulisse-aldrovandi");
    assert!(key_segment("Ulisse Aldrovandi").starts_with("ulisse-aldrovandi--"));
}

proptest! {
    #[test]
    fn minting_is_injective(a in "[ -~]{0,12}", b in "[ -~]{0,12}") {
        let m = mapping();
        for kind in [Kind::Actor, Kind::Item, Kind::Subject] {
            let (x, y) = (m.policy.mint(kind, &a), m.policy.mint(kind, &b));
            prop_assert_eq!(a == b, x == y);
        }
        prop_assert_ne!(m.policy.mint(Kind::Actor, &a), m.policy.mint(Kind::Device, &a));
    }

    #[test]
    fn minting_is_stable(a in "\\PC{0,16}") {
        let m = mapping();
        prop_assert_eq!(m.policy.mint(Kind::Work, &a), m.policy.mint(Kind::Work, &a));
    }
}
