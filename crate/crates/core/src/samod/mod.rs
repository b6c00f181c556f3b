//! SAMOD-style iteration harness: test-case bundles, model / data /
//! query phases, and merging of modelets into the cumulative model.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::profile::{
    check_consistency, extract_profile, load_sources, undeclared_terms, ProfileError, ProfileGraph,
    ProfileStats, Severity, TermManifest,
};
use crate::query::{compare_results, execute, parse_query, parse_tsv, Query, ResultTable};
use crate::rdf::{read_graph_file, Graph};
use crate::shapes::{validate, ShapeSet};

#[derive(Debug, thiserror::Error)]
pub enum SamodError {
    #[error("bundle {dir}: missing {missing}")]
    BundleLayout { dir: PathBuf, missing: String },
    #[error("{file}: {message}")]
    Parse { file: PathBuf, message: String },
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Clone, Debug)]
pub struct QueryCase {
    pub name: String,
    pub query: Query,
    pub expected: ResultTable,
}

/// One iteration bundle.
#[derive(Clone, Debug)]
pub struct TestCase {
    pub id: u32,
    pub dir: PathBuf,
    pub scenario: String,
    pub glossary: Vec<(String, String)>,
    pub manifest: TermManifest,
    pub data: Graph,
    pub queries: Vec<QueryCase>,
    pub warnings: Vec<String>,
}

fn read(path: &Path) -> Result<String, SamodError> {
    std::fs::read_to_string(path).map_err(|e| SamodError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn require(dir: &Path, name: &str) -> Result<PathBuf, SamodError> {
    let p = dir.join(name);
    if p.exists() {
        Ok(p)
    } else {
        Err(SamodError::BundleLayout {
            dir: dir.to_path_buf(),
            missing: name.to_string(),
        })
    }
}

fn parse_err(file: &Path, message: impl ToString) -> SamodError {
    SamodError::Parse {
        file: file.to_path_buf(),
        message: message.to_string(),
    }
}

/// Iteration number taken from the digits of the directory name.
pub fn bundle_id(dir: &Path) -> Option<u32> {
    let name = dir.file_name()?.to_str()?;
    let digits: String = name.chars().filter(char::is_ascii_digit).collect();
    digits.parse().ok()
}

/// Loads `scenario.md`, `glossary.csv`, `manifest.json`, `data.ttl` and
/// `queries/*.cq` with a sibling `.tsv` of expected results each. A
/// bundle without a `queries` directory has no competency questions.
pub fn load_test_case(dir: &Path) -> Result<TestCase, SamodError> {
    let id = bundle_id(dir).ok_or_else(|| SamodError::BundleLayout {
        dir: dir.to_path_buf(),
        missing: "iteration number in directory name".into(),
    })?;
    let scenario = read(&require(dir, "scenario.md")?)?;
    let glossary_path = require(dir, "glossary.csv")?;
    let text = read(&glossary_path)?;
    let mut glossary = Vec::new();
    for rec in csv::Reader::from_reader(text.as_bytes()).records() {
        let rec = rec.map_err(|e| parse_err(&glossary_path, e))?;
        if rec.len() != 2 {
            return Err(parse_err(&glossary_path, "expected term,definition rows"));
        }
        glossary.push((rec[0].to_string(), rec[1].to_string()));
    }
    let manifest_path = require(dir, "manifest.json")?;
    let manifest = TermManifest::load(&manifest_path)?;
    let data_path = require(dir, "data.ttl")?;
    let data = read_graph_file(&data_path).map_err(|e| parse_err(&data_path, e))?;

    let mut warnings = Vec::new();
    if scenario.trim().is_empty() {
        warnings.push("scenario.md is empty".to_string());
    }
    if glossary.is_empty() {
        warnings.push("glossary.csv has no entries".to_string());
    }
    let qdir = dir.join("queries");
    let mut files: Vec<PathBuf> = if qdir.is_dir() {
        std::fs::read_dir(&qdir)
            .map_err(|e| SamodError::Io {
                path: qdir.clone(),
                source: e,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "cq"))
            .collect()
    } else {
        Vec::new()
    };
    files.sort();
    let mut queries = Vec::new();
    for f in files {
        let name = f
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("")
            .to_string();
        let query = parse_query(&read(&f)?).map_err(|e| parse_err(&f, e))?;
        let tsv = f.with_extension("tsv");
        if !tsv.exists() {
            return Err(SamodError::BundleLayout {
                dir: dir.to_path_buf(),
                missing: format!("queries/{name}.tsv"),
            });
        }
        let expected = parse_tsv(&read(&tsv)?).map_err(|e| parse_err(&tsv, e))?;
        queries.push(QueryCase {
            name,
            query,
            expected,
        });
    }
    if queries.is_empty() {
        warnings.push("no competency questions in queries/".to_string());
    }
    Ok(TestCase {
        id,
        dir: dir.to_path_buf(),
        scenario,
        glossary,
        manifest,
        data,
        queries,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Model,
    Data,
    Query,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhaseOutcome {
    pub phase: Phase,
    pub passed: bool,
    pub findings: Vec<String>,
    pub warnings: Vec<String>,
}

impl PhaseOutcome {
    fn new(phase: Phase, findings: Vec<String>, warnings: Vec<String>) -> Self {
        PhaseOutcome {
            phase,
            passed: findings.is_empty(),
            findings,
            warnings,
        }
    }
}

/// Consistency outcome for an extracted profile.
pub fn check_model(profile: &ProfileGraph, sources: &BTreeMap<String, Graph>) -> PhaseOutcome {
    let findings = check_consistency(profile, sources);
    let errors = findings
        .iter()
        .filter(|f| f.severity == Severity::Error)
        .map(|f| f.to_string())
        .collect();
    let warnings = profile.warnings.iter().map(|f| f.to_string()).collect();
    PhaseOutcome::new(Phase::Model, errors, warnings)
}

/// Extracts the modelet of `tc` and checks it against the sources.
/// Returns the modelet when extraction succeeded.
pub fn run_model_test(
    tc: &TestCase,
    sources: &BTreeMap<String, Graph>,
) -> (PhaseOutcome, Option<ProfileGraph>) {
    match extract_profile(&tc.manifest, sources) {
        Ok(profile) => (check_model(&profile, sources), Some(profile)),
        Err(ProfileError::MissingInSource(terms)) => {
            let findings = terms
                .iter()
                .map(|t| format!("error: MissingInSource {t}: not defined by its source"))
                .collect();
            (PhaseOutcome::new(Phase::Model, findings, Vec::new()), None)
        }
        Err(e) => (
            PhaseOutcome::new(Phase::Model, vec![e.to_string()], Vec::new()),
            None,
        ),
    }
}

/// Validates the exemplar data with the shapes restricted to `model`,
/// and checks that the data uses only terms `model` declares.
pub fn run_data_test(tc: &TestCase, model: &TermManifest, shapes: &ShapeSet) -> PhaseOutcome {
    let restricted = shapes.restrict(
        &model.category_set(crate::profile::Category::Class),
        &model.property_set(),
    );
    let report = validate(&tc.data, &restricted);
    let mut findings: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
    for t in undeclared_terms(&tc.data, model) {
        findings.push(format!(
            "closed vocabulary: {t} is not declared in the model"
        ));
    }
    PhaseOutcome::new(Phase::Data, findings, Vec::new())
}

/// Runs every competency question and compares with its expected table.
pub fn run_query_test(tc: &TestCase) -> PhaseOutcome {
    let mut findings = Vec::new();
    for qc in &tc.queries {
        let actual = execute(&qc.query, &tc.data);
        let diff = compare_results(&actual, &qc.expected, !qc.query.order_by.is_empty());
        if !diff.is_empty() {
            let mut msg = format!("{}:", qc.name);
            for line in diff.to_text().lines() {
                let _ = write!(msg, "\n  {line}");
            }
            findings.push(msg);
        }
    }
    let warnings = if tc.queries.is_empty() {
        vec!["no competency questions; query phase passes vacuously".to_string()]
    } else {
        Vec::new()
    };
    PhaseOutcome::new(Phase::Query, findings, warnings)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TestReport {
    pub id: u32,
    pub model: PhaseOutcome,
    pub data: PhaseOutcome,
    pub query: PhaseOutcome,
    pub warnings: Vec<String>,
    pub passed: bool,
}

/// Runs the model, data and query phases of one bundle on its own modelet.
pub fn run_test_case(
    tc: &TestCase,
    sources_root: &Path,
    shapes: &ShapeSet,
) -> Result<TestReport, SamodError> {
    let sources = load_sources(&tc.manifest, sources_root)?;
    let (model, _) = run_model_test(tc, &sources);
    let data = run_data_test(tc, &tc.manifest, shapes);
    let query = run_query_test(tc);
    let passed = model.passed && data.passed && query.passed;
    Ok(TestReport {
        id: tc.id,
        model,
        data,
        query,
        warnings: tc.warnings.clone(),
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Regression {
    pub bundle: u32,
    pub outcome: PhaseOutcome,
}

#[derive(Clone, Debug)]
pub struct MergeOutcome {
    pub manifest: TermManifest,
    pub profile: Option<ProfileGraph>,
    pub stats: ProfileStats,
    pub model: PhaseOutcome,
    pub regressions: Vec<Regression>,
}

/// Unions the manifests, re-extracts the profile from the fixed sources
/// and re-runs the data and query phases of every prior bundle against
/// the merged model.
pub fn merge_iteration(
    current: &TermManifest,
    tc: &TestCase,
    prior: &[TestCase],
    sources_root: &Path,
    shapes: &ShapeSet,
) -> Result<MergeOutcome, SamodError> {
    let manifest = current.union(&tc.manifest)?;
    let sources = load_sources(&manifest, sources_root)?;
    let (model, profile) = match extract_profile(&manifest, &sources) {
        Ok(p) => (check_model(&p, &sources), Some(p)),
        Err(e) => (
            PhaseOutcome::new(Phase::Model, vec![e.to_string()], Vec::new()),
            None,
        ),
    };
    let mut regressions = Vec::new();
    for old in prior {
        for outcome in [run_data_test(old, &manifest, shapes), run_query_test(old)] {
            if !outcome.passed {
                regressions.push(Regression {
                    bundle: old.id,
                    outcome,
                });
            }
        }
    }
    Ok(MergeOutcome {
        stats: manifest.stats(),
        manifest,
        profile,
        model,
        regressions,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterationReport {
    pub report: TestReport,
    pub merged_stats: ProfileStats,
    pub merged_model: PhaseOutcome,
    pub regressions: Vec<Regression>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub iterations: Vec<IterationReport>,
    pub warnings: Vec<String>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        for it in &self.iterations {
            let r = &it.report;
            let mark = |p: &PhaseOutcome| if p.passed { "pass" } else { "FAIL" };
            let _ = writeln!(
                out,
                "iteration {:02}: model {} / data {} / query {}; merged {}",
                r.id,
                mark(&r.model),
                mark(&r.data),
                mark(&r.query),
                serde_json::to_string(&it.merged_stats).expect("stats"),
            );
            for p in [&r.model, &r.data, &r.query, &it.merged_model] {
                for f in &p.findings {
                    let _ = writeln!(out, "  {:?}: {f}", p.phase);
                }
            }
            for w in &r.warnings {
                let _ = writeln!(out, "  warning: {w}");
            }
            for reg in &it.regressions {
                for f in &reg.outcome.findings {
                    let _ = writeln!(
                        out,
                        "  regression in iteration {:02} ({:?}): {f}",
                        reg.bundle, reg.outcome.phase
                    );
                }
            }
        }
        let _ = writeln!(out, "{}", if self.passed { "PASS" } else { "FAIL" });
        out
    }

    pub fn regressed_bundles(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self
            .iterations
            .iter()
            .flat_map(|it| it.regressions.iter().map(|r| r.bundle))
            .collect();
        ids.sort();
        ids.dedup();
        ids
    }
}

/// Loads every bundle directory under `dir`, ordered by iteration number.
pub fn load_bundles(dir: &Path) -> Result<Vec<TestCase>, SamodError> {
    let entries = std::fs::read_dir(dir).map_err(|e| SamodError::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    let mut cases = dirs
        .iter()
        .map(|d| load_test_case(d))
        .collect::<Result<Vec<_>, _>>()?;
    cases.sort_by_key(|c| c.id);
    for pair in cases.windows(2) {
        if pair[0].id == pair[1].id {
            return Err(SamodError::BundleLayout {
                dir: pair[1].dir.clone(),
                missing: format!("a unique iteration number ({} is repeated)", pair[1].id),
            });
        }
    }
    Ok(cases)
}

/// Runs every bundle in iteration order, merging each into the
/// cumulative model and re-checking the earlier bundles.
pub fn run_suite(
    bundles: &Path,
    sources_root: &Path,
    shapes: &ShapeSet,
) -> Result<SuiteReport, SamodError> {
    let cases = load_bundles(bundles)?;
    let mut report = SuiteReport {
        passed: true,
        ..Default::default()
    };
    if cases.is_empty() {
        report
            .warnings
            .push(format!("no bundles found in {}", bundles.display()));
        return Ok(report);
    }
    let mut model = TermManifest::default();
    for (i, tc) in cases.iter().enumerate() {
        let own = run_test_case(tc, sources_root, shapes)?;
        let merged = merge_iteration(&model, tc, &cases[..i], sources_root, shapes)?;
        report.passed &= own.passed && merged.model.passed && merged.regressions.is_empty();
        report.iterations.push(IterationReport {
            report: own,
            merged_stats: merged.stats,
            merged_model: merged.model,
            regressions: merged.regressions,
        });
        model = merged.manifest;
    }
    Ok(report)
}
