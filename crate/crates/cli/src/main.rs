use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use chad_core::ingest::{
    bind_objects, bind_processes, parse_table, Schema, SplitRules, VocabularyTable,
};
use chad_core::lowering::with_workers;
use chad_core::profile::{
    check_consistency, extract_profile, load_sources, Severity, TermManifest,
};
use chad_core::query::{compare_results, execute, parse_query, parse_tsv};
use chad_core::rdf::{read_graph_file, serialize_graph, RdfFormat};
use chad_core::samod::run_suite;
use chad_core::shapes::{load_shapes, validate, ShapeSet};
use chad_core::{convert_dataset, Mapping};

#[derive(Parser)]
#[command(
    name = "chad",
    version,
    about = "Profile extraction, CSV-to-RDF conversion, validation and iteration testing"
)]
struct Cli {
    /// JSON config file; flags take precedence over its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for lowering and validation.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum)]
    report: Option<ReportFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Turtle,
    Ntriples,
}

impl From<Format> for RdfFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Turtle => RdfFormat::Turtle,
            Format::Ntriples => RdfFormat::NTriples,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Extract the application profile selected by a term manifest.
    Extract(ExtractArgs),
    /// Convert the object and process tables into an RDF graph.
    Convert(ConvertArgs),
    /// Validate a graph against shape constraints.
    Validate(ValidateArgs),
    /// Run a competency question, optionally against expected results.
    Query(QueryArgs),
    /// Run every iteration bundle in order.
    Test(TestArgs),
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Directory that source paths in the manifest are relative to.
    #[arg(long)]
    sources: Option<PathBuf>,
    /// Where to write the profile graph.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long)]
    objects: Option<PathBuf>,
    #[arg(long)]
    process: Option<PathBuf>,
    #[arg(long)]
    mapping: Option<PathBuf>,
    /// Token table; defaults to the one named by the mapping.
    #[arg(long)]
    vocabulary: Option<PathBuf>,
    /// Graph output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Multi-entity delimiter for every column.
    #[arg(long)]
    delimiter: Option<char>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    shapes: Option<PathBuf>,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    query: PathBuf,
    /// Expected results as TSV.
    #[arg(long)]
    expected: Option<PathBuf>,
}

#[derive(Args)]
struct TestArgs {
    #[arg(long)]
    bundles: Option<PathBuf>,
    #[arg(long)]
    sources: Option<PathBuf>,
    #[arg(long)]
    shapes: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    sources: Option<PathBuf>,
    manifest: Option<PathBuf>,
    mapping: Option<PathBuf>,
    vocabulary: Option<PathBuf>,
    shapes: Option<PathBuf>,
    bundles: Option<PathBuf>,
    objects: Option<PathBuf>,
    process: Option<PathBuf>,
    output: Option<PathBuf>,
    format: Option<Format>,
    delimiter: Option<char>,
    workers: Option<usize>,
    report: Option<ReportFormat>,
}

impl Config {
    fn load(path: &Path) -> Result<Self, Failure> {
        let text =
            fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let mut c: Config =
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut c.sources,
            &mut c.manifest,
            &mut c.mapping,
            &mut c.vocabulary,
            &mut c.shapes,
            &mut c.bundles,
            &mut c.objects,
            &mut c.process,
            &mut c.output,
        ] {
            if let Some(v) = p.as_mut() {
                *v = dir.join(&*v);
            }
        }
        Ok(c)
    }
}

/// Resolved settings for one run.
struct RunConfig {
    workers: usize,
    report: ReportFormat,
    config: Config,
}

enum Failure {
    /// Domain failure: validation, consistency or diff.
    Domain,
    /// Usage or I/O error.
    Usage(String),
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn pick(flag: Option<PathBuf>, config: &Option<PathBuf>, name: &str) -> Result<PathBuf, Failure> {
    let p = flag
        .or_else(|| config.clone())
        .ok_or_else(|| usage(format!("missing --{name}")))?;
    existing(p)
}

fn existing(p: PathBuf) -> Result<PathBuf, Failure> {
    if p.exists() {
        Ok(p)
    } else {
        Err(usage(format!("{}: no such file or directory", p.display())))
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| usage(e.to_string())),
    }
}

fn load_shape_file(path: &Path) -> Result<ShapeSet, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    load_shapes(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn extract(args: ExtractArgs, rc: &RunConfig) -> Result<(), Failure> {
    let manifest_path = pick(args.manifest, &rc.config.manifest, "manifest")?;
    let manifest = TermManifest::load(&manifest_path).map_err(|e| usage(e.to_string()))?;
    let root = match args.sources.or_else(|| rc.config.sources.clone()) {
        Some(p) => existing(p)?,
        None => manifest_path
            .parent()
            .unwrap_or(Path::new("."))
            .to_path_buf(),
    };
    let sources = load_sources(&manifest, &root).map_err(|e| usage(e.to_string()))?;
    let profile = match extract_profile(&manifest, &sources) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return Err(Failure::Domain);
        }
    };
    let mut findings = check_consistency(&profile, &sources);
    findings.extend(profile.warnings.iter().cloned());
    findings.sort();
    match rc.report {
        ReportFormat::Text => findings.iter().for_each(|f| eprintln!("{f}")),
        ReportFormat::Json => eprintln!("{}", serde_json::to_string(&findings).expect("findings")),
    }
    if let Some(out) = args.out.as_deref() {
        let format = args.format.or(rc.config.format).unwrap_or(Format::Turtle);
        write_output(Some(out), &serialize_graph(&profile.graph, format.into()))?;
    }
    println!("{}", profile.stats().to_json_line());
    if findings.iter().any(|f| f.severity == Severity::Error) {
        return Err(Failure::Domain);
    }
    Ok(())
}

fn convert(args: ConvertArgs, rc: &RunConfig) -> Result<(), Failure> {
    let mapping_path = pick(args.mapping, &rc.config.mapping, "mapping")?;
    let mapping = Mapping::load(&mapping_path).map_err(|e| usage(e.to_string()))?;
    let vocab_path = match args.vocabulary.or_else(|| rc.config.vocabulary.clone()) {
        Some(p) => p,
        None => mapping
            .vocabulary
            .clone()
            .ok_or_else(|| usage("missing --vocabulary and the mapping names none"))?,
    };
    let vocab_path = existing(vocab_path)?;
    let vocab_file =
        fs::File::open(&vocab_path).map_err(|e| usage(format!("{}: {e}", vocab_path.display())))?;
    let vocab = VocabularyTable::from_csv(vocab_file)
        .map_err(|e| usage(format!("{}: {e}", vocab_path.display())))?;
    let objects_path = pick(args.objects, &rc.config.objects, "objects")?;
    let process_path = match args.process.or_else(|| rc.config.process.clone()) {
        Some(p) => Some(existing(p)?),
        None => None,
    };
    let rules = SplitRules::with_default(args.delimiter.or(rc.config.delimiter).unwrap_or(';'));
    let format = args.format.or(rc.config.format).unwrap_or(Format::Turtle);
    let out = args.out.or_else(|| rc.config.output.clone());

    let read_rows = |path: &Path, schema| {
        let file = fs::File::open(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        parse_table(file, schema).map_err(|e| usage(format!("{}: {e}", path.display())))
    };
    let object_rows = read_rows(&objects_path, Schema::Object)?;
    let process_rows = match &process_path {
        Some(p) => read_rows(p, Schema::Process)?,
        None => Vec::new(),
    };
    let lowered = with_workers(rc.workers, || {
        let (objects, oerr) = bind_objects(&object_rows, &vocab, &rules);
        let (processes, perr) = bind_processes(&process_rows, &vocab, &rules);
        if !oerr.is_empty() || !perr.is_empty() {
            return Err((oerr, perr));
        }
        Ok(convert_dataset(&objects, &processes, &mapping))
    })
    .map_err(|e| usage(e.to_string()))?;
    let graph = match lowered {
        Ok(Ok(g)) => g,
        Ok(Err(e)) => {
            eprintln!("{}", serde_json::json!({ "error": e.to_string() }));
            return Err(Failure::Domain);
        }
        Err((oerr, perr)) => {
            let report = serde_json::json!({
                "objects": { "file": objects_path, "errors": oerr },
                "process": { "file": process_path, "errors": perr },
            });
            eprintln!("{}", serde_json::to_string_pretty(&report).expect("report"));
            return Err(Failure::Domain);
        }
    };
    write_output(out.as_deref(), &serialize_graph(&graph, format.into()))
}

fn validate_cmd(args: ValidateArgs, rc: &RunConfig) -> Result<(), Failure> {
    let graph_path = existing(args.graph)?;
    let g = read_graph_file(&graph_path)
        .map_err(|e| usage(format!("{}: {e}", graph_path.display())))?;
    let shapes = load_shape_file(&pick(args.shapes, &rc.config.shapes, "shapes")?)?;
    let report =
        with_workers(rc.workers, || validate(&g, &shapes)).map_err(|e| usage(e.to_string()))?;
    match rc.report {
        ReportFormat::Text => print!("{}", report.to_text()),
        ReportFormat::Json => println!("{}", report.to_json()),
    }
    if report.conforms {
        Ok(())
    } else {
        Err(Failure::Domain)
    }
}

fn query_cmd(args: QueryArgs) -> Result<(), Failure> {
    let graph_path = existing(args.graph)?;
    let g = read_graph_file(&graph_path)
        .map_err(|e| usage(format!("{}: {e}", graph_path.display())))?;
    let qpath = existing(args.query)?;
    let text =
        fs::read_to_string(&qpath).map_err(|e| usage(format!("{}: {e}", qpath.display())))?;
    let q = parse_query(&text).map_err(|e| usage(format!("{}: {e}", qpath.display())))?;
    let actual = execute(&q, &g);
    let Some(expected_path) = args.expected else {
        print!("{}", actual.to_tsv());
        return Ok(());
    };
    let expected_path = existing(expected_path)?;
    let text = fs::read_to_string(&expected_path)
        .map_err(|e| usage(format!("{}: {e}", expected_path.display())))?;
    let expected =
        parse_tsv(&text).map_err(|e| usage(format!("{}: {e}", expected_path.display())))?;
    let diff = compare_results(&actual, &expected, !q.order_by.is_empty());
    if diff.is_empty() {
        println!("match: {} row(s)", actual.rows.len());
        Ok(())
    } else {
        print!("{}", diff.to_text());
        Err(Failure::Domain)
    }
}

fn test_cmd(args: TestArgs, rc: &RunConfig) -> Result<(), Failure> {
    let bundles = pick(args.bundles, &rc.config.bundles, "bundles")?;
    let sources = pick(args.sources, &rc.config.sources, "sources")?;
    let shapes = load_shape_file(&pick(args.shapes, &rc.config.shapes, "shapes")?)?;
    let report = with_workers(rc.workers, || run_suite(&bundles, &sources, &shapes))
        .map_err(|e| usage(e.to_string()))?
        .map_err(|e| usage(e.to_string()))?;
    match rc.report {
        ReportFormat::Text => print!("{}", report.to_text()),
        ReportFormat::Json => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report"))
        }
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Domain)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let rc = RunConfig {
        workers: cli.workers.or(config.workers).unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        }),
        report: cli.report.or(config.report).unwrap_or(ReportFormat::Text),
        config,
    };
    if rc.workers == 0 {
        return Err(usage("--workers must be at least 1"));
    }
    match cli.command {
        Command::Extract(a) => extract(a, &rc),
        Command::Convert(a) => convert(a, &rc),
        Command::Validate(a) => validate_cmd(a, &rc),
        Command::Query(a) => query_cmd(a),
        Command::Test(a) => test_cmd(a, &rc),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("chad: {msg}");
            ExitCode::from(2)
        }
    }
}
