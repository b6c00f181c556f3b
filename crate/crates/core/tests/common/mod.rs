#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use chad_core::ingest::{
    bind_objects, bind_processes, parse_table, Schema, SplitRules, Stage, VocabularyTable,
};
use chad_core::lowering::with_workers;
use chad_core::query::{FilterOp, PatternTerm};
use chad_core::rdf::{Subject, Term};
use chad_core::shapes::load_shapes;
use chad_core::{
    convert_dataset, Graph, Mapping, ObjectRecord, ProcessRecord, Query, ResultTable, ShapeSet,
};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn mapping() -> Mapping {
    Mapping::load(&fixtures().join("mapping.json")).unwrap()
}

pub fn vocabulary() -> VocabularyTable {
    VocabularyTable::from_csv(std::fs::File::open(fixtures().join("vocabulary.csv")).unwrap())
        .unwrap()
}

pub fn shapes() -> ShapeSet {
    load_shapes(&std::fs::read_to_string(fixtures().join("chad_shapes.json")).unwrap()).unwrap()
}

pub fn exemplar_records() -> (Vec<ObjectRecord>, Vec<ProcessRecord>) {
    let vocab = vocabulary();
    let rules = SplitRules::default();
    let read = |name: &str, schema| {
        parse_table(
            std::fs::File::open(fixtures().join("data").join(name)).unwrap(),
            schema,
        )
        .unwrap()
    };
    let (objects, e1) = bind_objects(&read("objects.csv", Schema::Object), &vocab, &rules);
    let (processes, e2) = bind_processes(&read("process.csv", Schema::Process), &vocab, &rules);
    assert!(e1.is_empty() && e2.is_empty(), "{e1:?} {e2:?}");
    (objects, processes)
}

pub fn convert_exemplar(workers: usize) -> Graph {
    let (o, p) = exemplar_records();
    let m = mapping();
    with_workers(workers, || convert_dataset(&o, &p, &m))
        .unwrap()
        .unwrap()
}

/// Triple count predicted from the records alone. Nodes that several
/// records can share are keyed by name and counted once.
pub fn tally(objects: &[ObjectRecord], processes: &[ProcessRecord]) -> usize {
    let mut n = 0;
    let mut shared: BTreeSet<(String, String, String)> = BTreeSet::new();
    let mut put = |node: &str, key: &str, facet: &str| {
        shared.insert((node.to_string(), key.to_string(), facet.to_string()));
    };
    for o in objects {
        n += 2 + o.titles.len() * 4; // work type, R3; per title P102 + 3
        if let Some(p) = &o.parent_work {
            n += 1;
            for f in ["type", "p2", "label"] {
                put("parent", &p.key, f);
            }
        }
        n += 1 + 5; // expression type; creation type, R17, R19, P4 + span type
        n += if o.timespan.bounds().is_some() {
            2
        } else {
            usize::from(o.timespan.fuzzy.is_some())
        };
        for a in &o.creation_activities {
            n += 1 + 3 + usize::from(a.technique.is_some());
            put("actor", &a.agent, "E39");
            put("actor", &a.agent, "label");
        }
        n += o.subjects.len();
        for s in &o.subjects {
            for f in ["type", "p2", "label"] {
                put("subject", s, f);
            }
        }
        n += 3 + 5; // manifestation; license statement
        n += 2 + usize::from(o.item_description.is_some());
        n += o.identifiers.len() * 4 + o.depicts.len() + o.components.len();
        if let Some(k) = &o.keeper {
            n += 4;
            put("actor", k, "E39");
            put("actor", k, "label");
        }
        if let Some(c) = &o.collection {
            n += 1;
            for f in ["type", "p2", "label"] {
                put("collection", &c.name, f);
            }
            put("collection", &c.name, &format!("P53 {}", c.place));
            put("place", &c.place, "type");
            put("place", &c.place, "label");
            if let Some(k) = &o.keeper {
                put("collection", &c.name, &format!("P109 {k}"));
            }
        }
    }
    for p in processes {
        put("data", &p.output_data, "type");
        put("data", &p.output_data, "label");
        match &p.stage {
            Stage::Acquisition => {
                n += 2;
                put("item", &p.object_id, "E24");
            }
            Stage::Software(_) => {
                n += 3;
                let input = p.input_data.as_deref().unwrap();
                put("data", input, "type");
                put("data", input, "label");
            }
        }
        n += 2 + 3; // L11, P4; span type, P82a, P82b
        for person in &p.persons {
            n += 1;
            put("actor", person, "E21");
            put("actor", person, "label");
        }
        for g in &p.groups {
            n += 1;
            put("actor", g, "E74");
            put("actor", g, "label");
        }
        n += p.techniques.len() + p.devices.len();
        for d in &p.devices {
            for f in ["type", "p2", "label"] {
                put("device", &d.name, f);
            }
        }
        if let Some(sw) = &p.software {
            n += 1;
            put("software", sw, "type");
            put("software", sw, "label");
        }
        if p.output_license.is_some() {
            n += 5;
        }
    }
    n + shared.len()
}

fn unify(pt: &PatternTerm, value: &Term, b: &mut BTreeMap<String, Term>) -> bool {
    match pt {
        PatternTerm::Term(t) => t == value,
        PatternTerm::Var(v) => match b.get(v) {
            Some(bound) => bound == value,
            None => {
                b.insert(v.clone(), value.clone());
                true
            }
        },
    }
}

fn subject_term(s: &Subject) -> Term {
    match s {
        Subject::Iri(i) => Term::Iri(i.clone()),
        Subject::Blank(b) => Term::Blank(b.clone()),
    }
}

/// Nested-loop evaluation over every triple for every pattern, in
/// query order, with filters applied to complete solutions.
pub fn brute_force(q: &Query, g: &Graph) -> ResultTable {
    let mut solutions = vec![BTreeMap::new()];
    for pat in &q.patterns {
        let mut next = Vec::new();
        for b in &solutions {
            for t in g.iter() {
                let mut b2 = b.clone();
                if unify(&pat.s, &subject_term(&t.subject), &mut b2)
                    && unify(&pat.p, &Term::Iri(t.predicate.clone()), &mut b2)
                    && unify(&pat.o, &t.object, &mut b2)
                {
                    next.push(b2);
                }
            }
        }
        solutions = next;
    }
    solutions.retain(|b| {
        q.filters.iter().all(|f| {
            let v = &b[&f.var];
            match &f.op {
                FilterOp::Equals(t) => v == t,
                FilterOp::Contains { value, on_str } => match v {
                    Term::Literal(l) => l.lexical().contains(value.as_str()),
                    Term::Iri(i) => *on_str && i.as_str().contains(value.as_str()),
                    Term::Blank(_) => false,
                },
            }
        })
    });
    let project =
        |b: &BTreeMap<String, Term>| q.select.iter().map(|v| b[v].clone()).collect::<Vec<_>>();
    solutions.sort_by(|a, b| {
        for k in &q.order_by {
            let o = a[&k.var].cmp(&b[&k.var]);
            let o = if k.descending { o.reverse() } else { o };
            if o.is_ne() {
                return o;
            }
        }
        project(a).cmp(&project(b))
    });
    let mut rows: Vec<Vec<Term>> = solutions.iter().map(project).collect();
    if q.distinct {
        let mut seen = BTreeSet::new();
        rows.retain(|r| seen.insert(r.clone()));
    }
    ResultTable {
        header: q.select.clone(),
        rows,
    }
}

/// Every `*.cq` under the shipped bundles with its expected table path.
pub fn shipped_queries() -> Vec<(PathBuf, PathBuf)> {
    let mut out = Vec::new();
    let bundles = fixtures().join("bundles");
    let mut dirs: Vec<_> = std::fs::read_dir(&bundles)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    dirs.sort();
    for d in dirs {
        let q = d.join("queries");
        if !q.is_dir() {
            continue;
        }
        let mut files: Vec<_> = std::fs::read_dir(&q)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        for f in files {
            if f.extension().is_some_and(|x| x == "cq") {
                out.push((f.clone(), f.with_extension("tsv")));
            }
        }
    }
    out
}

/// Every Turtle file shipped under fixtures/.
pub fn fixture_graph_files() -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![fixtures()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "ttl" || x == "nt") {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

pub mod seeded {
    use std::collections::BTreeMap;

    use chad_core::profile::{extract_profile, load_sources, FindingKind, ProfileGraph};
    use chad_core::rdf::vocab::rdfs;
    use chad_core::rdf::{Iri, Literal, Triple};
    use chad_core::shapes::ConstraintKind;
    use chad_core::{Graph, TermManifest};

    pub const CRM: &str = "http://www.cidoc-crm.org/cidoc-crm/";
    pub const DIG: &str = "http://www.ics.forth.gr/isl/CRMdig/";
    pub const BASE: &str = "https://example.org/chad/";

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    pub fn full_profile() -> (ProfileGraph, BTreeMap<String, Graph>) {
        let m = TermManifest::load(&super::fixtures().join("manifests/chad-ap.json")).unwrap();
        let sources = load_sources(&m, &super::fixtures().join("sources")).unwrap();
        (extract_profile(&m, &sources).unwrap(), sources)
    }

    /// Profile tamperings with the finding kind each must produce.
    pub fn tamperings(p: &ProfileGraph) -> Vec<(&'static str, FindingKind, ProfileGraph)> {
        let mut foreign = p.clone();
        foreign.graph.insert(Triple::new(
            iri(&format!("{CRM}E21_Person")),
            rdfs::sub_class_of(),
            iri("http://iflastandards.info/ns/lrm/lrmoo/F5_Item"),
        ));
        let mut narrowed = p.clone();
        let p14 = iri(&format!("{CRM}P14_carried_out_by"));
        assert!(narrowed.graph.remove(&Triple::new(
            p14.clone(),
            rdfs::range(),
            iri(&format!("{CRM}E39_Actor"))
        )));
        narrowed.graph.insert(Triple::new(
            p14,
            rdfs::range(),
            iri(&format!("{CRM}E21_Person")),
        ));
        let mut missing = p.clone();
        missing.graph.insert(Triple::new(
            iri(&format!("{CRM}E999_Invented")),
            rdfs::label(),
            Literal::string("Invented"),
        ));
        vec![
            (
                "foreign subsumption",
                FindingKind::ForeignSubsumption,
                foreign,
            ),
            ("narrowed range", FindingKind::RangeNarrowed, narrowed),
            ("missing term", FindingKind::MissingInSource, missing),
        ]
    }

    fn find(g: &Graph, subject: &str, predicate: &str) -> Triple {
        g.iter()
            .find(|t| {
                t.subject.as_iri().is_some_and(|s| s.as_str() == subject)
                    && t.predicate.as_str() == predicate
            })
            .unwrap_or_else(|| panic!("no {subject} {predicate}"))
            .clone()
    }

    /// Single-triple mutations of the exemplar graph, with the violated
    /// constraint kind and focus node.
    pub fn shape_mutations(g: &Graph) -> Vec<(&'static str, ConstraintKind, String, Graph)> {
        let mut out = Vec::new();

        let mut m = g.clone();
        let title = format!("{BASE}title/mo-001-original-1");
        assert!(m.remove(&find(&m, &title, &format!("{CRM}P2_has_type"))));
        out.push(("missing title type", ConstraintKind::MinCount, title, m));

        let mut m = g.clone();
        let span = format!("{BASE}timespan/mo-002-creation");
        let t = find(&m, &span, &format!("{CRM}P82a_begin_of_the_begin"));
        m.remove(&t);
        let lexical = t.object.as_literal().unwrap().lexical().to_string();
        m.insert(Triple::new(
            t.subject.clone(),
            t.predicate.clone(),
            Literal::string(lexical),
        ));
        out.push(("wrong datatype on P82a", ConstraintKind::Datatype, span, m));

        let mut m = g.clone();
        let acq = format!("{BASE}activity/mo-003-scan-acquisition");
        m.insert(Triple::new(
            iri(&acq),
            iri(&format!("{CRM}P32_used_general_technique")),
            iri("http://vocab.getty.edu/aat/300053225"),
        ));
        out.push((
            "out-of-vocabulary technique",
            ConstraintKind::ValueIn,
            acq,
            m,
        ));

        let mut m = g.clone();
        let span = format!("{BASE}timespan/mo-001-raw-images-process");
        m.insert(Triple::new(
            iri(&span),
            iri(&format!("{CRM}P82a_begin_of_the_begin")),
            Literal::typed(
                "2023-03-01T08:00:00",
                iri("http://www.w3.org/2001/XMLSchema#dateTime"),
            )
            .unwrap(),
        ));
        out.push(("second P82a beyond max", ConstraintKind::MaxCount, span, m));

        let mut m = g.clone();
        let exec = format!("{BASE}activity/mo-001-mesh-execution");
        assert!(m.remove(&find(&m, &exec, &format!("{DIG}L10_had_input"))));
        out.push((
            "software stage without input",
            ConstraintKind::MinCount,
            exec,
            m,
        ));
        out
    }
}

/// Terms named in the prose description of the two modules, by local name.
pub const DESK_CLASSES: [&str; 21] = [
    "F1_Work",
    "E35_Title",
    "E55_Type",
    "F2_Expression",
    "F28_Expression_Creation",
    "E52_Time-Span",
    "E7_Activity",
    "E39_Actor",
    "E73_Information_Object",
    "F3_Manifestation",
    "F5_Item",
    "E42_Identifier",
    "E24_Physical_Human-Made_Thing",
    "E53_Place",
    "D2_Digitization_Process",
    "D9_Data_Object",
    "E21_Person",
    "E74_Group",
    "D8_Digital_Device",
    "D10_Software_Execution",
    "D14_Software",
];
pub const DESK_PROPERTIES: [&str; 6] = [
    "P82a_begin_of_the_begin",
    "P82b_end_of_the_end",
    "P82_at_some_time_within",
    "P70i_is_documented_in",
    "P3_has_note",
    "P46_is_composed_of",
];
pub const DESK_INDIVIDUALS: [&str; 15] = [
    "300417204",
    "300417207",
    "300404387",
    "300054196",
    "300404126",
    "300435434",
    "300054277",
    "300025976",
    "300053580",
    "300391312",
    "300266792",
    "300429747",
    "300054636",
    "300391447",
    "300386427",
];

pub mod arb {
    use chad_core::rdf::{Iri, Literal, Term, Triple};
    use chad_core::Graph;
    use proptest::prelude::*;

    pub fn iri() -> impl Strategy<Value = Iri> {
        (
            prop::sample::select(vec![
                "http://www.cidoc-crm.org/cidoc-crm/",
                "https://example.org/chad/item/",
                "http://vocab.getty.edu/aat/",
                "urn:x:",
            ]),
            "[A-Za-z0-9_-]{1,8}",
        )
            .prop_map(|(ns, local)| Iri::new(format!("{ns}{local}")).unwrap())
    }

    pub fn literal() -> impl Strategy<Value = Literal> {
        let xsd = |l: &str| Iri::new(format!("http://www.w3.org/2001/XMLSchema#{l}")).unwrap();
        prop_oneof![
            "\\PC{0,12}".prop_map(Literal::string),
            "[ -~\n\t\"\\\\]{0,12}".prop_map(Literal::string),
            ("\\PC{0,8}", prop::sample::select(vec!["en", "it", "en-GB"]))
                .prop_map(|(s, l)| Literal::lang_tagged(s, l).unwrap()),
            (-1000i64..1000)
                .prop_map(move |n| Literal::typed(n.to_string(), xsd("integer")).unwrap()),
            "[0-9]{4}-0[1-9]-1[0-9]T0[0-9]:00:00".prop_map(move |s| Literal::typed(
                s,
                xsd("dateTime")
            )
            .unwrap()),
        ]
    }

    pub fn triple() -> impl Strategy<Value = Triple> {
        let object = prop_oneof![iri().prop_map(Term::Iri), literal().prop_map(Term::Literal)];
        (iri(), iri(), object).prop_map(|(s, p, o)| Triple::new(s, p, o))
    }

    /// Up to 50 triples, no blank nodes.
    pub fn graph() -> impl Strategy<Value = Graph> {
        prop::collection::vec(triple(), 0..=50).prop_map(|ts| {
            let mut g = Graph::new();
            for t in ts {
                g.insert(t);
            }
            g
        })
    }
}
