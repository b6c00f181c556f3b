mod common;

use std::collections::BTreeSet;

use chad_core::ingest::{
    bind_objects, bind_processes, bind_records, parse_table, split_cell, IngestError, Records,
    Schema, SplitRules, Stage, TableError, TimeSpan, OBJECT_COLUMNS, PROCESS_COLUMNS,
};
use chad_core::lowering::with_workers;
use common::*;
use proptest::prelude::*;

fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixtures().join("data").join(name)).unwrap()
}

#[test]
fn fixture_rows_bind_cleanly() {
    let (o, p) = exemplar_records();
    assert_eq!(o.len(), 10);
    assert_eq!(p.len(), 6);
    let fuzzy = o.iter().find(|r| r.object_id == "mo-003").unwrap();
    assert_eq!(fuzzy.timespan, TimeSpan::fuzzy("16th century"));
    let acq = &p[0];
    assert_eq!(acq.stage, Stage::Acquisition);
    assert_eq!(
        acq.techniques[0].as_str(),
        "http://vocab.getty.edu/aat/300053580"
    );
    assert_eq!(o[1].depicts, ["mo-003"]);
    assert_eq!(o[5].components, ["mo-007", "mo-008"]);
}

#[test]
fn header_only_and_header_mismatch() {
    let header = OBJECT_COLUMNS.join(",");
    assert!(parse_table(header.as_bytes(), Schema::Object)
        .unwrap()
        .is_empty());
    match parse_table(header.as_bytes(), Schema::Process) {
        Err(TableError::HeaderMismatch { expected, found }) => {
            assert_eq!(expected, PROCESS_COLUMNS);
            assert_eq!(found.len(), OBJECT_COLUMNS.len());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn ragged_row_is_a_syntax_error() {
    let text = format!("{}\na,b\n", PROCESS_COLUMNS.join(","));
    assert!(matches!(
        parse_table(text.as_bytes(), Schema::Process),
        Err(TableError::CsvSyntax { line: 2, .. })
    ));
}

#[test]
fn quoted_delimiter_is_kept() {
    let rows = parse_table(fixture_text("objects.csv").as_bytes(), Schema::Object).unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!(
        rows[1].cell(Schema::Object, "identifiers"),
        "Tavole vol. 1, c. 24|inventory number"
    );
    assert_eq!(split_cell("P1; P2 ;P3", ';'), ["P1", "P2", "P3"]);
    assert!(split_cell("", ';').is_empty());
}

#[test]
fn unknown_token_names_row_and_column() {
    let text =
        fixture_text("process.csv").replacen("structured light scanning", "laser wizardry", 1);
    let rows = parse_table(text.as_bytes(), Schema::Process).unwrap();
    let (records, errors) = bind_processes(&rows, &vocabulary(), &SplitRules::default());
    assert_eq!(records.len(), 5);
    assert_eq!(
        errors,
        vec![IngestError::UnknownVocabularyToken {
            row: 7,
            column: "techniques".into(),
            token: "laser wizardry".into()
        }]
    );
}

#[test]
fn software_stage_without_input_is_rejected() {
    let text = fixture_text("process.csv").replacen(
        ",mo-001-raw-images,mo-001-dense-cloud",
        ",,mo-001-dense-cloud",
        1,
    );
    let rows = parse_table(text.as_bytes(), Schema::Process).unwrap();
    let (records, errors) = bind_processes(&rows, &vocabulary(), &SplitRules::default());
    assert_eq!(records.len(), 5);
    assert!(matches!(
        errors.as_slice(),
        [IngestError::InvariantViolation { row: 3, .. }]
    ));
}

#[test]
fn duplicate_object_id() {
    let text = fixture_text("objects.csv").replacen("mo-002,", "mo-001,", 1);
    let rows = parse_table(text.as_bytes(), Schema::Object).unwrap();
    let (records, errors) = bind_objects(&rows, &vocabulary(), &SplitRules::default());
    assert_eq!(records.len(), 9);
    assert!(
        matches!(errors.as_slice(), [IngestError::DuplicateKey { row: 3, key, .. }] if key == "mo-001")
    );
}

#[test]
fn missing_required_cell() {
    let text = fixture_text("objects.csv").replacen(",book,", ",,", 1);
    let rows = parse_table(text.as_bytes(), Schema::Object).unwrap();
    let (_, errors) = bind_objects(&rows, &vocabulary(), &SplitRules::default());
    assert!(
        matches!(errors.as_slice(), [IngestError::MissingRequired { row: 2, column }] if column == "manifestation_type")
    );
}

#[test]
fn inverted_interval_is_rejected() {
    let text =
        fixture_text("objects.csv").replacen("1560-01-01/1590-12-31", "1590-12-31/1560-01-01", 1);
    let rows = parse_table(text.as_bytes(), Schema::Object).unwrap();
    let (_, errors) = bind_objects(&rows, &vocabulary(), &SplitRules::default());
    assert!(matches!(
        errors.as_slice(),
        [IngestError::InvariantViolation { row: 3, .. }]
    ));
}

#[test]
fn per_column_delimiter() {
    let text = fixture_text("objects.csv").replacen(
        "birds; natural history",
        "birds / natural history",
        1,
    );
    let rows = parse_table(text.as_bytes(), Schema::Object).unwrap();
    let mut rules = SplitRules::default();
    rules.per_column.insert("subjects".into(), '/');
    let (records, errors) = bind_objects(&rows, &vocabulary(), &rules);
    assert!(errors.is_empty());
    assert_eq!(records[0].subjects, ["birds", "natural history"]);
    assert_eq!(records[1].subjects, ["birds; parrots"]);
}

#[test]
fn day_dates_get_day_bounds() {
    let (o, _) = exemplar_records();
    let r = o.iter().find(|r| r.object_id == "mo-004").unwrap();
    let (b, e) = r.timespan.bounds().unwrap();
    assert_eq!(b.to_string(), "1580-05-12 00:00:00");
    assert_eq!(e.to_string(), "1580-05-12 23:59:59");
}

const STAGES: [&str; 4] = ["acquisition", "processing", "modelling", "bogus"];
const KEYS: [&str; 4] = ["", "d1", "d2", "d3"];
const DATES: [&str; 4] = ["2023-01-01T10:00:00", "2023-01-02", "soon", ""];
const TECH: [&str; 3] = ["", "photogrammetry", "nonsense"];

fn arb_row() -> impl Strategy<Value = String> {
    (
        0..4usize,
        0..4usize,
        0..4usize,
        0..4usize,
        0..4usize,
        0..3usize,
        any::<bool>(),
    )
        .prop_map(|(st, inp, out, d1, d2, t, sw)| {
            format!(
                "{},mo-001,{},{},{},{},Anna Rossi,,{},,{},,",
                STAGES[st],
                KEYS[inp],
                KEYS[out],
                DATES[d1],
                DATES[d2],
                TECH[t],
                if sw { "Blender" } else { "" }
            )
        })
}

proptest! {
    #[test]
    fn every_row_is_accounted_for_once(rows in prop::collection::vec(arb_row(), 0..12)) {
        let text = format!("{}\n{}\n", PROCESS_COLUMNS.join(","), rows.join("\n"));
        let raw = parse_table(text.as_bytes(), Schema::Process).unwrap();
        let vocab = vocabulary();
        let rules = SplitRules::default();
        let run = |n| with_workers(n, || bind_records(&raw, Schema::Process, &vocab, &rules)).unwrap();
        let (records, errors) = run(1);
        prop_assert_eq!(run(4), (records.clone(), errors.clone()));
        let Records::Processes(records) = records else { panic!() };
        let rejected: BTreeSet<u64> = errors.iter().map(|e| e.row()).collect();
        prop_assert_eq!(rejected.len(), errors.len());
        prop_assert_eq!(records.len() + errors.len(), raw.len());
        let mut outputs = BTreeSet::new();
        for r in &records {
            prop_assert!(outputs.insert(r.output_data.clone()));
            let (b, e) = r.timespan.bounds().unwrap();
            prop_assert!(b <= e);
            match r.stage {
                Stage::Acquisition => prop_assert!(r.input_data.is_none() && r.software.is_none()),
                Stage::Software(_) => {
                    prop_assert!(r.input_data.is_some());
                    prop_assert_ne!(r.input_data.as_deref(), Some(r.output_data.as_str()));
                }
            }
        }
    }
}
