//! Shared fixture loading for the benchmarks.

use std::collections::BTreeMap;
use std::path::PathBuf;

use chad_core::ingest::{
    bind_objects, bind_processes, parse_table, Schema, SplitRules, VocabularyTable,
};
use chad_core::{
    load_shapes, load_sources, Graph, Mapping, ObjectRecord, ProcessRecord, ShapeSet, TermManifest,
};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn manifest() -> TermManifest {
    TermManifest::load(&fixtures().join("manifests/chad-ap.json")).unwrap()
}

pub fn sources(m: &TermManifest) -> BTreeMap<String, Graph> {
    load_sources(m, &fixtures().join("sources")).unwrap()
}

pub fn mapping() -> Mapping {
    Mapping::load(&fixtures().join("mapping.json")).unwrap()
}

pub fn shapes() -> ShapeSet {
    load_shapes(&std::fs::read_to_string(fixtures().join("chad_shapes.json")).unwrap()).unwrap()
}

pub fn exemplar() -> Graph {
    chad_core::read_graph_file(&fixtures().join("exemplar.ttl")).unwrap()
}

/// Bound exemplar records, repeated `copies` times with distinct keys.
pub fn records(copies: usize) -> (Vec<ObjectRecord>, Vec<ProcessRecord>) {
    let vocab =
        VocabularyTable::from_csv(std::fs::File::open(fixtures().join("vocabulary.csv")).unwrap())
            .unwrap();
    let rules = SplitRules::default();
    let mut objects = Vec::new();
    let mut processes = Vec::new();
    for n in 0..copies {
        let read = |name: &str, schema| {
            let text = std::fs::read_to_string(fixtures().join("data").join(name)).unwrap();
            let text = if n == 0 {
                text
            } else {
                text.replace("mo-", &format!("mo{n}-"))
                    .replace("dp-", &format!("dp{n}-"))
            };
            parse_table(text.as_bytes(), schema).unwrap()
        };
        objects.extend(bind_objects(&read("objects.csv", Schema::Object), &vocab, &rules).0);
        processes.extend(bind_processes(&read("process.csv", Schema::Process), &vocab, &rules).0);
    }
    (objects, processes)
}
