use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::LoweringError;
use crate::rdf::vocab;
use crate::rdf::{Iri, PrefixMap};

/// Kinds of minted resources; each has its own path segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Work,
    ParentWork,
    Expression,
    Manifestation,
    Item,
    Activity,
    Timespan,
    Title,
    Identifier,
    Actor,
    DataObject,
    Device,
    Software,
    Statement,
    Subject,
    Collection,
    Place,
}

impl Kind {
    pub const ALL: [Kind; 17] = [
        Kind::Work,
        Kind::ParentWork,
        Kind::Expression,
        Kind::Manifestation,
        Kind::Item,
        Kind::Activity,
        Kind::Timespan,
        Kind::Title,
        Kind::Identifier,
        Kind::Actor,
        Kind::DataObject,
        Kind::Device,
        Kind::Software,
        Kind::Statement,
        Kind::Subject,
        Kind::Collection,
        Kind::Place,
    ];
}

/// Lowercase ASCII alphanumerics with single hyphens between runs.
pub fn slug(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending = false;
    for c in text.chars() {
        if c.is_ascii_alphanumeric() {
            if pending && !out.is_empty() {
                out.push('-');
            }
            pending = false;
            out.push(c.to_ascii_lowercase());
        } else {
            pending = true;
        }
    }
    out
}

/// Path-safe form of a record key. Keys that are already slugs are used
/// unchanged; any other key gets a hash suffix after a double hyphen,
/// which no slug contains, so distinct keys never share a result.
pub fn key_segment(key: &str) -> String {
    let s = slug(key);
    if s == key {
        return s;
    }
    let digest = Sha256::digest(key.as_bytes());
    let hex: String = digest[..6].iter().map(|b| format!("{b:02x}")).collect();
    if s.is_empty() {
        format!("k--{hex}")
    } else {
        format!("{s}--{hex}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MintingPolicy {
    pub base: Iri,
    pub segments: BTreeMap<Kind, String>,
}

impl MintingPolicy {
    pub fn new(base: Iri, segments: BTreeMap<Kind, String>) -> Result<Self, LoweringError> {
        for kind in Kind::ALL {
            let seg = segments
                .get(&kind)
                .ok_or_else(|| LoweringError::Mapping(format!("no segment for kind {kind:?}")))?;
            if !seg.ends_with('/') || seg.len() < 2 {
                return Err(LoweringError::Mapping(format!(
                    "segment {seg:?} must be non-empty and end with '/'"
                )));
            }
        }
        let mut seen: Vec<&String> = segments.values().collect();
        seen.sort();
        seen.dedup();
        if seen.len() != segments.len() {
            return Err(LoweringError::Mapping("segments must be distinct".into()));
        }
        Ok(MintingPolicy { base, segments })
    }

    /// `<base><segment><key>`.
    pub fn mint(&self, kind: Kind, key: &str) -> Iri {
        let iri = format!(
            "{}{}{}",
            self.base.as_str(),
            self.segments[&kind],
            key_segment(key)
        );
        Iri::new(iri).expect("minted IRIs are valid")
    }

    /// `<base><segment><key>-<role>` for structure nodes owned by a record.
    pub fn mint_role(&self, kind: Kind, key: &str, role: &str) -> Iri {
        let iri = format!(
            "{}{}{}-{role}",
            self.base.as_str(),
            self.segments[&kind],
            key_segment(key)
        );
        Iri::new(iri).expect("minted IRIs are valid")
    }
}

/// Model relations of the object and process modules and the
/// properties that realise them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeTable {
    pub has_type: Iri,
    pub has_title: Iri,
    pub content: Iri,
    pub label: Iri,
    pub realised_in: Iri,
    pub created: Iri,
    pub created_realisation_of: Iri,
    pub has_time_span: Iri,
    pub consists_of: Iri,
    pub carried_out_by: Iri,
    pub technique: Iri,
    pub about: Iri,
    pub embodies: Iri,
    pub refers_to: Iri,
    pub documented_in: Iri,
    pub exemplifies: Iri,
    pub note: Iri,
    pub identified_by: Iri,
    pub depicts: Iri,
    pub used_object: Iri,
    pub curator: Iri,
    pub composed_of: Iri,
    pub location: Iri,
    pub has_component: Iri,
    pub begin: Iri,
    pub end: Iri,
    pub fuzzy: Iri,
    pub digitized: Iri,
    pub had_input: Iri,
    pub had_output: Iri,
    pub on_device: Iri,
    pub used_software: Iri,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassTable {
    pub work: Iri,
    pub expression: Iri,
    pub manifestation: Iri,
    pub item: Iri,
    pub expression_creation: Iri,
    pub title: Iri,
    pub time_span: Iri,
    pub activity: Iri,
    pub actor: Iri,
    pub information_object: Iri,
    pub identifier: Iri,
    pub physical_thing: Iri,
    pub place: Iri,
    pub digitization: Iri,
    pub data_object: Iri,
    pub software_execution: Iri,
    pub device: Iri,
    pub software: Iri,
    pub person: Iri,
    pub group: Iri,
}

/// Fixed type individuals for title kinds and structure nodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeTable {
    pub original_title: Iri,
    pub exhibition_title: Iri,
    pub subject: Iri,
    pub license: Iri,
    pub curation: Iri,
    pub collection: Iri,
}

fn entries<T: Serialize>(t: &T) -> BTreeMap<String, Iri> {
    match serde_json::to_value(t).expect("table serialize") {
        serde_json::Value::Object(m) => m
            .into_iter()
            .map(|(k, v)| (k, Iri::new(v.as_str().expect("string")).expect("valid IRI")))
            .collect(),
        _ => unreachable!(),
    }
}

impl EdgeTable {
    pub fn entries(&self) -> BTreeMap<String, Iri> {
        entries(self)
    }
}

impl ClassTable {
    pub fn entries(&self) -> BTreeMap<String, Iri> {
        entries(self)
    }
}

impl TypeTable {
    pub fn entries(&self) -> BTreeMap<String, Iri> {
        entries(self)
    }
}

/// Everything the lowering needs: minting, edges, classes, fixed types
/// and the prefixes used when writing output.
#[derive(Clone, Debug)]
pub struct Mapping {
    pub policy: MintingPolicy,
    pub edges: EdgeTable,
    pub classes: ClassTable,
    pub types: TypeTable,
    pub prefixes: PrefixMap,
    /// Vocabulary table path, relative to the mapping file.
    pub vocabulary: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMapping {
    base: String,
    #[serde(default)]
    vocabulary: Option<PathBuf>,
    #[serde(default)]
    prefixes: BTreeMap<String, String>,
    segments: BTreeMap<Kind, String>,
    classes: BTreeMap<String, String>,
    edges: BTreeMap<String, String>,
    types: BTreeMap<String, String>,
}

fn expand_table<T: serde::de::DeserializeOwned>(
    section: &str,
    raw: BTreeMap<String, String>,
    prefixes: &PrefixMap,
) -> Result<T, LoweringError> {
    let mut out = serde_json::Map::new();
    for (k, v) in raw {
        let iri = match prefixes.expand(&v) {
            Some(r) => r.map_err(|e| LoweringError::Mapping(format!("{section}.{k}: {e}")))?,
            None => Iri::new(&v).map_err(|_| {
                LoweringError::Mapping(format!("{section}.{k}: cannot expand {v:?}"))
            })?,
        };
        out.insert(k, serde_json::Value::String(iri.as_str().to_string()));
    }
    serde_json::from_value(serde_json::Value::Object(out))
        .map_err(|e| LoweringError::Mapping(format!("{section}: {e}")))
}

impl Mapping {
    pub fn from_json(text: &str) -> Result<Self, LoweringError> {
        let raw: RawMapping =
            serde_json::from_str(text).map_err(|e| LoweringError::Mapping(e.to_string()))?;
        let mut prefixes = PrefixMap::new();
        for (label, ns) in vocab::standard_prefixes() {
            prefixes
                .insert(label, Iri::new(ns).expect("static namespace"))
                .expect("distinct");
        }
        for (label, ns) in raw.prefixes {
            let ns = Iri::new(&ns).map_err(|e| LoweringError::Mapping(e.to_string()))?;
            prefixes
                .insert(label, ns)
                .map_err(|e| LoweringError::Mapping(e.to_string()))?;
        }
        let base = Iri::new(&raw.base).map_err(|e| LoweringError::Mapping(e.to_string()))?;
        Ok(Mapping {
            policy: MintingPolicy::new(base, raw.segments)?,
            edges: expand_table("edges", raw.edges, &prefixes)?,
            classes: expand_table("classes", raw.classes, &prefixes)?,
            types: expand_table("types", raw.types, &prefixes)?,
            prefixes,
            vocabulary: raw.vocabulary,
        })
    }

    pub fn load(path: &Path) -> Result<Self, LoweringError> {
        let text = std::fs::read_to_string(path).map_err(|e| LoweringError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let mut m = Self::from_json(&text)?;
        if let (Some(v), Some(dir)) = (&m.vocabulary, path.parent()) {
            m.vocabulary = Some(dir.join(v));
        }
        Ok(m)
    }
}
