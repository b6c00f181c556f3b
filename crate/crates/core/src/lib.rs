pub mod ingest;
pub mod lowering;
pub mod profile;
pub mod query;
pub mod rdf;
pub mod samod;
pub mod shapes;

pub use ingest::{
    bind_records, IngestError, ObjectRecord, ProcessRecord, Records, Schema, SplitRules,
    VocabularyTable,
};
pub use lowering::{
    convert_dataset, lower_object, lower_process, LoweringError, Mapping, MintingPolicy,
};
pub use profile::{
    check_consistency, extract_profile, load_sources, ConsistencyFinding, ProfileError,
    ProfileGraph, ProfileStats, TermManifest,
};
pub use query::{
    compare_results, execute, parse_query, parse_tsv, Query, QueryError, ResultDiff, ResultTable,
};
pub use rdf::{
    graphs_equal, merge_graphs, parse_str, read_graph_file, serialize_graph, Graph, Iri, RdfError,
    RdfFormat, Term, Triple,
};
pub use samod::{load_test_case, run_suite, SamodError, SuiteReport, TestCase};
pub use shapes::{load_shapes, validate, ShapeSet, ValidationReport, Violation};
