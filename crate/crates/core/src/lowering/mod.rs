//! Translation of bound records into profile-conformant RDF.

mod mapping;

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::ingest::{format_date_time, ObjectRecord, ProcessRecord, Stage, TimeSpan, TitleKind};
use crate::rdf::vocab::{rdf, xsd};
use crate::rdf::{Graph, Iri, Literal, Term, Triple};

pub use mapping::{
    key_segment, slug, ClassTable, EdgeTable, Kind, Mapping, MintingPolicy, TypeTable,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    Depicts,
    Component,
    ProcessObject,
    InputData,
}

impl fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReferenceKind::Depicts => "depicts",
            ReferenceKind::Component => "components",
            ReferenceKind::ProcessObject => "object_id",
            ReferenceKind::InputData => "input_data",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoweringError {
    #[error("unresolved {kind} reference {key:?}")]
    UnresolvedReference { kind: ReferenceKind, key: String },
    #[error("invalid mapping: {0}")]
    Mapping(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot start worker pool: {0}")]
    Workers(String),
}

struct Emitter<'m> {
    m: &'m Mapping,
    g: Graph,
}

impl<'m> Emitter<'m> {
    fn new(m: &'m Mapping) -> Self {
        Emitter {
            m,
            g: Graph::with_prefixes(m.prefixes.clone()),
        }
    }

    fn add(&mut self, s: &Iri, p: &Iri, o: impl Into<Term>) {
        self.g.insert(Triple::new(s.clone(), p.clone(), o.into()));
    }

    fn a(&mut self, s: &Iri, class: &Iri) {
        self.add(s, &rdf::type_(), class.clone());
    }

    fn text(&mut self, s: &Iri, p: &Iri, text: &str) {
        self.add(s, p, Literal::string(text));
    }

    fn label(&mut self, s: &Iri, text: &str) {
        let p = self.m.edges.label.clone();
        self.text(s, &p, text);
    }

    fn mint(&self, kind: Kind, key: &str) -> Iri {
        self.m.policy.mint(kind, key)
    }

    fn role(&self, kind: Kind, key: &str, role: &str) -> Iri {
        self.m.policy.mint_role(kind, key, role)
    }

    fn timespan(&mut self, node: &Iri, span: &TimeSpan) {
        let e = &self.m.edges;
        let (begin, end, fuzzy) = (e.begin.clone(), e.end.clone(), e.fuzzy.clone());
        self.a(node, &self.m.classes.time_span.clone());
        if let Some((b, en)) = span.bounds() {
            let lit = |t| Literal::typed(format_date_time(t), xsd::date_time()).expect("typed");
            self.add(node, &begin, lit(&b));
            self.add(node, &end, lit(&en));
        } else if let Some(label) = &span.fuzzy {
            self.text(node, &fuzzy, label);
        }
    }

    fn actor(&mut self, name: &str, class: &Iri) -> Iri {
        let node = self.mint(Kind::Actor, name);
        self.a(&node, class);
        self.label(&node, name);
        node
    }

    fn statement(&mut self, key: &str, statement: &str, document: &Iri, about: &Iri) {
        let m = self.m;
        let node = self.role(Kind::Statement, key, "license");
        self.a(&node, &m.classes.information_object);
        self.add(&node, &m.edges.has_type, m.types.license.clone());
        self.text(&node, &m.edges.content, statement);
        self.add(&node, &m.edges.refers_to, about.clone());
        self.add(&node, &m.edges.documented_in, document.clone());
    }

    fn data_object(&mut self, key: &str) -> Iri {
        let node = self.mint(Kind::DataObject, key);
        self.a(&node, &self.m.classes.data_object.clone());
        self.label(&node, key);
        node
    }
}

/// Emits the Work / Expression / Manifestation / Item structure of one
/// catalogue record with its titles, creation, subjects, license,
/// identifiers, curation and collection.
pub fn lower_object(rec: &ObjectRecord, m: &Mapping) -> Graph {
    let (e, c, t) = (&m.edges, &m.classes, &m.types);
    let mut out = Emitter::new(m);
    let key = rec.object_id.as_str();
    let work = out.mint(Kind::Work, key);
    let expression = out.mint(Kind::Expression, key);
    let manifestation = out.mint(Kind::Manifestation, key);
    let item = out.mint(Kind::Item, key);

    out.a(&work, &c.work);
    let mut counters = [0usize; 2];
    for title in &rec.titles {
        let (idx, role, kind_type) = match title.kind {
            TitleKind::Original => (0, "original", &t.original_title),
            TitleKind::Exhibition => (1, "exhibition", &t.exhibition_title),
        };
        counters[idx] += 1;
        let node = out.role(Kind::Title, key, &format!("{role}-{}", counters[idx]));
        out.add(&work, &e.has_title, node.clone());
        out.a(&node, &c.title);
        out.add(&node, &e.has_type, kind_type.clone());
        out.text(&node, &e.content, &title.text);
    }
    out.add(&work, &e.realised_in, expression.clone());
    if let Some(parent) = &rec.parent_work {
        let node = out.mint(Kind::ParentWork, &parent.key);
        out.a(&node, &c.work);
        out.add(&node, &e.has_type, parent.work_type.clone());
        out.label(&node, &parent.key);
        out.add(&node, &e.has_component, work.clone());
    }

    out.a(&expression, &c.expression);
    let creation = out.role(Kind::Activity, key, "creation");
    let span = out.role(Kind::Timespan, key, "creation");
    out.a(&creation, &c.expression_creation);
    out.add(&creation, &e.created, expression.clone());
    out.add(&creation, &e.created_realisation_of, work.clone());
    out.add(&creation, &e.has_time_span, span.clone());
    out.timespan(&span, &rec.timespan);
    for (n, act) in rec.creation_activities.iter().enumerate() {
        let node = out.role(Kind::Activity, key, &format!("creation-{}", n + 1));
        out.add(&creation, &e.consists_of, node.clone());
        out.a(&node, &c.activity);
        let agent = out.actor(&act.agent, &c.actor);
        out.add(&node, &e.carried_out_by, agent);
        out.add(&node, &e.has_type, act.role.clone());
        if let Some(tech) = &act.technique {
            out.add(&node, &e.technique, tech.clone());
        }
    }
    for subject in &rec.subjects {
        let node = out.mint(Kind::Subject, subject);
        out.add(&expression, &e.about, node.clone());
        out.a(&node, &c.information_object);
        out.add(&node, &e.has_type, t.subject.clone());
        out.label(&node, subject);
    }

    out.a(&manifestation, &c.manifestation);
    out.add(&manifestation, &e.has_type, rec.manifestation_type.clone());
    out.add(&manifestation, &e.embodies, expression.clone());
    out.statement(
        key,
        &rec.license.statement,
        &rec.license.document,
        &manifestation,
    );

    out.a(&item, &c.item);
    out.add(&item, &e.exemplifies, manifestation.clone());
    if let Some(note) = &rec.item_description {
        out.text(&item, &e.note, note);
    }
    for (n, id) in rec.identifiers.iter().enumerate() {
        let node = out.role(Kind::Identifier, key, &(n + 1).to_string());
        out.add(&item, &e.identified_by, node.clone());
        out.a(&node, &c.identifier);
        out.text(&node, &e.content, &id.value);
        out.add(&node, &e.has_type, id.id_type.clone());
    }
    for other in &rec.depicts {
        out.add(&item, &e.depicts, m.policy.mint(Kind::Expression, other));
    }
    for part in &rec.components {
        out.add(&item, &e.composed_of, m.policy.mint(Kind::Item, part));
    }
    let keeper = rec.keeper.as_ref().map(|k| out.actor(k, &c.actor));
    if let Some(keeper) = &keeper {
        let node = out.role(Kind::Activity, key, "curation");
        out.a(&node, &c.activity);
        out.add(&node, &e.has_type, t.curation.clone());
        out.add(&node, &e.used_object, item.clone());
        out.add(&node, &e.carried_out_by, keeper.clone());
    }
    if let Some(coll) = &rec.collection {
        let node = out.mint(Kind::Collection, &coll.name);
        out.a(&node, &c.physical_thing);
        out.add(&node, &e.has_type, t.collection.clone());
        out.label(&node, &coll.name);
        let place = out.mint(Kind::Place, &coll.place);
        out.add(&node, &e.location, place.clone());
        out.a(&place, &c.place);
        out.label(&place, &coll.place);
        if let Some(keeper) = &keeper {
            out.add(&node, &e.curator, keeper.clone());
        }
        out.add(&node, &e.composed_of, item.clone());
    }
    out.g
}

/// Emits one acquisition or software-execution stage.
pub fn lower_process(rec: &ProcessRecord, m: &Mapping) -> Graph {
    let (e, c) = (&m.edges, &m.classes);
    let mut out = Emitter::new(m);
    let key = rec.output_data.as_str();
    let output = out.data_object(key);
    let activity = match &rec.stage {
        Stage::Acquisition => {
            let node = out.role(Kind::Activity, key, "acquisition");
            out.a(&node, &c.digitization);
            let item = out.mint(Kind::Item, &rec.object_id);
            out.a(&item, &c.physical_thing);
            out.add(&node, &e.digitized, item);
            node
        }
        Stage::Software(stage) => {
            let node = out.role(Kind::Activity, key, "execution");
            out.a(&node, &c.software_execution);
            out.add(&node, &e.has_type, stage.clone());
            let input = out.data_object(rec.input_data.as_deref().expect("validated"));
            out.add(&node, &e.had_input, input);
            node
        }
    };
    out.add(&activity, &e.had_output, output.clone());
    let span = out.role(Kind::Timespan, key, "process");
    out.add(&activity, &e.has_time_span, span.clone());
    out.timespan(&span, &rec.timespan);
    for person in &rec.persons {
        let node = out.actor(person, &c.person);
        out.add(&activity, &e.carried_out_by, node);
    }
    for group in &rec.groups {
        let node = out.actor(group, &c.group);
        out.add(&activity, &e.carried_out_by, node);
    }
    for tech in &rec.techniques {
        out.add(&activity, &e.technique, tech.clone());
    }
    for device in &rec.devices {
        let node = out.mint(Kind::Device, &device.name);
        out.a(&node, &c.device);
        out.add(&node, &e.has_type, device.device_type.clone());
        out.label(&node, &device.name);
        out.add(&activity, &e.on_device, node);
    }
    if let Some(sw) = &rec.software {
        let node = out.mint(Kind::Software, sw);
        out.a(&node, &c.software);
        out.label(&node, sw);
        out.add(&activity, &e.used_software, node);
    }
    if let Some(lic) = &rec.output_license {
        out.statement(key, &lic.statement, &lic.document, &output);
    }
    out.g
}

/// Checks cross-record references, then lowers every record on the
/// current rayon pool and unions the results.
pub fn convert_dataset(
    objects: &[ObjectRecord],
    processes: &[ProcessRecord],
    m: &Mapping,
) -> Result<Graph, LoweringError> {
    let ids: BTreeSet<&str> = objects.iter().map(|o| o.object_id.as_str()).collect();
    let outputs: BTreeSet<&str> = processes.iter().map(|p| p.output_data.as_str()).collect();
    let unresolved = |kind, key: &str| LoweringError::UnresolvedReference {
        kind,
        key: key.to_string(),
    };
    for o in objects {
        if let Some(k) = o.depicts.iter().find(|k| !ids.contains(k.as_str())) {
            return Err(unresolved(ReferenceKind::Depicts, k));
        }
        if let Some(k) = o.components.iter().find(|k| !ids.contains(k.as_str())) {
            return Err(unresolved(ReferenceKind::Component, k));
        }
    }
    for p in processes {
        if !ids.contains(p.object_id.as_str()) {
            return Err(unresolved(ReferenceKind::ProcessObject, &p.object_id));
        }
        if let Some(i) = p.input_data.as_deref().filter(|i| !outputs.contains(i)) {
            return Err(unresolved(ReferenceKind::InputData, i));
        }
    }
    let parts: Vec<Graph> = objects
        .par_iter()
        .map(|o| lower_object(o, m))
        .chain(processes.par_iter().map(|p| lower_process(p, m)))
        .collect();
    let mut g = Graph::with_prefixes(m.prefixes.clone());
    for part in parts {
        g.extend(part.into_triples());
    }
    Ok(g)
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(
    workers: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, LoweringError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| LoweringError::Workers(e.to_string()))?;
    Ok(pool.install(f))
}
