//! Shape constraints over produced graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rdf::vocab::{self, rdf};
use crate::rdf::{Graph, Iri, PrefixMap, Subject, Term, Triple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Iri,
    Literal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyConstraint {
    pub path: Iri,
    pub min_count: usize,
    pub max_count: Option<usize>,
    pub node_kind: Option<NodeKind>,
    pub datatype: Option<Iri>,
    pub value_in: Option<BTreeSet<Iri>>,
    pub value_class: Option<Iri>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub id: String,
    pub target_class: Iri,
    pub constraints: Vec<PropertyConstraint>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ShapeSet {
    pub shapes: Vec<Shape>,
}

#[derive(Debug, thiserror::Error)]
#[error("shape schema error at {path}: {message}")]
pub struct ShapeSchemaError {
    pub path: String,
    pub message: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShapes {
    #[serde(default)]
    prefixes: BTreeMap<String, String>,
    #[serde(default)]
    shapes: Vec<RawShape>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShape {
    id: String,
    target_class: String,
    #[serde(default)]
    properties: Vec<RawConstraint>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraint {
    path: String,
    #[serde(default)]
    min_count: usize,
    #[serde(default)]
    max_count: Option<usize>,
    #[serde(default)]
    node_kind: Option<NodeKind>,
    #[serde(default)]
    datatype: Option<String>,
    #[serde(default)]
    value_in: Option<Vec<String>>,
    #[serde(default)]
    value_class: Option<String>,
}

fn schema_error(path: impl Into<String>, message: impl Into<String>) -> ShapeSchemaError {
    ShapeSchemaError {
        path: path.into(),
        message: message.into(),
    }
}

/// Parses a JSON shapes document, enforcing the constraint invariants.
pub fn load_shapes(text: &str) -> Result<ShapeSet, ShapeSchemaError> {
    let raw: RawShapes = serde_json::from_str(text)
        .map_err(|e| schema_error(format!("line {}", e.line()), e.to_string()))?;
    let mut prefixes = PrefixMap::new();
    for (label, ns) in vocab::standard_prefixes() {
        prefixes
            .insert(label, Iri::new(ns).expect("static"))
            .expect("distinct");
    }
    for (label, ns) in &raw.prefixes {
        let ns =
            Iri::new(ns).map_err(|e| schema_error(format!("prefixes.{label}"), e.to_string()))?;
        prefixes
            .insert(label.clone(), ns)
            .map_err(|e| schema_error(format!("prefixes.{label}"), e.to_string()))?;
    }
    let expand = |at: &str, s: &str| -> Result<Iri, ShapeSchemaError> {
        match prefixes.expand(s) {
            Some(Ok(i)) => Ok(i),
            _ => Iri::new(s).map_err(|_| schema_error(at, format!("cannot expand {s:?}"))),
        }
    };
    let mut ids = BTreeSet::new();
    let mut shapes = Vec::new();
    for (i, rs) in raw.shapes.iter().enumerate() {
        let at = format!("shapes[{i}]");
        if !ids.insert(rs.id.clone()) {
            return Err(schema_error(&at, format!("duplicate shape id {:?}", rs.id)));
        }
        let target_class = expand(&format!("{at}.target_class"), &rs.target_class)?;
        let mut constraints = Vec::new();
        for (j, rc) in rs.properties.iter().enumerate() {
            let at = format!("{at}.properties[{j}]");
            if rc.max_count.is_some_and(|max| rc.min_count > max) {
                return Err(schema_error(&at, "min_count exceeds max_count"));
            }
            if rc.datatype.is_some() && rc.node_kind != Some(NodeKind::Literal) {
                return Err(schema_error(&at, "datatype requires node_kind literal"));
            }
            if (rc.value_in.is_some() || rc.value_class.is_some())
                && rc.node_kind == Some(NodeKind::Literal)
            {
                return Err(schema_error(
                    &at,
                    "value_in and value_class require IRI values",
                ));
            }
            let value_in = match &rc.value_in {
                Some(list) => Some(
                    list.iter()
                        .map(|v| expand(&format!("{at}.value_in"), v))
                        .collect::<Result<BTreeSet<_>, _>>()?,
                ),
                None => None,
            };
            constraints.push(PropertyConstraint {
                path: expand(&format!("{at}.path"), &rc.path)?,
                min_count: rc.min_count,
                max_count: rc.max_count,
                node_kind: rc.node_kind,
                datatype: rc
                    .datatype
                    .as_deref()
                    .map(|d| expand(&format!("{at}.datatype"), d))
                    .transpose()?,
                value_in,
                value_class: rc
                    .value_class
                    .as_deref()
                    .map(|c| expand(&format!("{at}.value_class"), c))
                    .transpose()?,
            });
        }
        shapes.push(Shape {
            id: rs.id.clone(),
            target_class,
            constraints,
        });
    }
    Ok(ShapeSet { shapes })
}

impl ShapeSet {
    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn target_classes(&self) -> BTreeSet<Iri> {
        self.shapes.iter().map(|s| s.target_class.clone()).collect()
    }

    /// Keeps shapes whose target class is in `classes`, and within them
    /// the constraints whose path is in `properties` or is a built-in
    /// annotation property.
    pub fn restrict(&self, classes: &BTreeSet<Iri>, properties: &BTreeSet<Iri>) -> ShapeSet {
        let shapes = self
            .shapes
            .iter()
            .filter(|s| classes.contains(&s.target_class))
            .map(|s| Shape {
                id: s.id.clone(),
                target_class: s.target_class.clone(),
                constraints: s
                    .constraints
                    .iter()
                    .filter(|c| properties.contains(&c.path) || vocab::is_meta_term(&c.path))
                    .cloned()
                    .collect(),
            })
            .collect();
        ShapeSet { shapes }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConstraintKind {
    MinCount,
    MaxCount,
    NodeKind,
    Datatype,
    ValueIn,
    ValueClass,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub focus: Subject,
    pub shape: String,
    pub path: Iri,
    pub kind: ConstraintKind,
    pub value: Option<Term>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {:?} on {}: {}",
            self.focus, self.shape, self.kind, self.path, self.message
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub conforms: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.conforms {
            out.push_str("conforms\n");
        } else {
            let _ = writeln!(out, "{} violation(s)", self.violations.len());
            for v in &self.violations {
                let _ = writeln!(out, "{v}");
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialize")
    }
}

struct Index<'g> {
    outgoing: HashMap<&'g Subject, Vec<&'g Triple>>,
    types: HashSet<(&'g Subject, &'g Iri)>,
}

impl<'g> Index<'g> {
    fn new(g: &'g Graph) -> Self {
        let type_ = rdf::type_();
        let mut outgoing: HashMap<&Subject, Vec<&Triple>> = HashMap::new();
        let mut types = HashSet::new();
        for t in g.iter() {
            outgoing.entry(&t.subject).or_default().push(t);
            if t.predicate == type_ {
                if let Term::Iri(c) = &t.object {
                    types.insert((&t.subject, c));
                }
            }
        }
        Index { outgoing, types }
    }

    fn has_type(&self, node: &Term, class: &Iri) -> bool {
        match node.to_subject() {
            Some(s) => self.types.contains(&(&s, class)),
            None => false,
        }
    }
}

fn check_focus(idx: &Index, focus: &Subject, shape: &Shape, out: &mut Vec<Violation>) {
    let empty = Vec::new();
    let triples = idx.outgoing.get(focus).unwrap_or(&empty);
    for c in &shape.constraints {
        let values: Vec<&Term> = triples
            .iter()
            .filter(|t| t.predicate == c.path)
            .map(|t| &t.object)
            .collect();
        let mut push = |kind, value: Option<&Term>, message: String| {
            out.push(Violation {
                focus: focus.clone(),
                shape: shape.id.clone(),
                path: c.path.clone(),
                kind,
                value: value.cloned(),
                message,
            })
        };
        if values.len() < c.min_count {
            push(
                ConstraintKind::MinCount,
                None,
                format!(
                    "expected at least {} value(s), found {}",
                    c.min_count,
                    values.len()
                ),
            );
        }
        if let Some(max) = c.max_count.filter(|m| values.len() > *m) {
            push(
                ConstraintKind::MaxCount,
                None,
                format!("expected at most {max} value(s), found {}", values.len()),
            );
        }
        for v in values {
            let is_literal = matches!(v, Term::Literal(_));
            match c.node_kind {
                Some(NodeKind::Iri) if is_literal => {
                    push(
                        ConstraintKind::NodeKind,
                        Some(v),
                        format!("{v} is not an IRI"),
                    );
                    continue;
                }
                Some(NodeKind::Literal) if !is_literal => {
                    push(
                        ConstraintKind::NodeKind,
                        Some(v),
                        format!("{v} is not a literal"),
                    );
                    continue;
                }
                _ => {}
            }
            if let (Some(dt), Term::Literal(l)) = (&c.datatype, v) {
                if l.datatype() != dt {
                    push(
                        ConstraintKind::Datatype,
                        Some(v),
                        format!("{v} is not of datatype {dt}"),
                    );
                }
            }
            if let Some(allowed) = &c.value_in {
                if !v.as_iri().is_some_and(|i| allowed.contains(i)) {
                    push(
                        ConstraintKind::ValueIn,
                        Some(v),
                        format!("{v} is not an allowed value"),
                    );
                }
            }
            if let Some(class) = &c.value_class {
                if !idx.has_type(v, class) {
                    push(
                        ConstraintKind::ValueClass,
                        Some(v),
                        format!("{v} is not typed {class}"),
                    );
                }
            }
        }
    }
}

/// Evaluates every shape on every node explicitly typed with its target
/// class. Subclass typing is not inferred.
pub fn validate(g: &Graph, shapes: &ShapeSet) -> ValidationReport {
    let idx = Index::new(g);
    let type_ = rdf::type_();
    let mut work: Vec<(&Subject, &Shape)> = Vec::new();
    for shape in &shapes.shapes {
        let target = Term::Iri(shape.target_class.clone());
        for t in g.match_pattern(None, Some(&type_), Some(&target)) {
            work.push((&t.subject, shape));
        }
    }
    let mut violations: Vec<Violation> = work
        .par_iter()
        .flat_map_iter(|(focus, shape)| {
            let mut v = Vec::new();
            check_focus(&idx, focus, shape, &mut v);
            v
        })
        .collect();
    violations.sort();
    violations.dedup();
    ValidationReport {
        conforms: violations.is_empty(),
        violations,
    }
}
