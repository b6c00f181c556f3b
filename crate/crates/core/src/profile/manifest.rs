use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ProfileError;
use crate::rdf::Iri;

/// The four term categories of an application profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Class,
    ObjectProperty,
    DataProperty,
    Individual,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Class,
        Category::ObjectProperty,
        Category::DataProperty,
        Category::Individual,
    ];

    fn key(self) -> &'static str {
        match self {
            Category::Class => "classes",
            Category::ObjectProperty => "object_properties",
            Category::DataProperty => "data_properties",
            Category::Individual => "individuals",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceDecl {
    pub namespace: Iri,
    pub path: PathBuf,
    pub version: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SelectedTerm {
    pub iri: Iri,
    pub source: String,
}

/// A declared selection of terms drawn from source ontologies.
///
/// Terms keep their manifest order inside each category.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermManifest {
    pub sources: BTreeMap<String, SourceDecl>,
    pub classes: Vec<SelectedTerm>,
    pub object_properties: Vec<SelectedTerm>,
    pub data_properties: Vec<SelectedTerm>,
    pub individuals: Vec<SelectedTerm>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileStats {
    pub classes: usize,
    pub object_properties: usize,
    pub data_properties: usize,
    pub individuals: usize,
}

impl ProfileStats {
    pub fn as_tuple(&self) -> (usize, usize, usize, usize) {
        (
            self.classes,
            self.object_properties,
            self.data_properties,
            self.individuals,
        )
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("stats serialize")
    }
}

#[derive(Serialize, Deserialize)]
struct RawSource {
    namespace: String,
    path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    version: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct RawTerm {
    iri: String,
    source: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    #[serde(default)]
    sources: BTreeMap<String, RawSource>,
    #[serde(default)]
    prefixes: BTreeMap<String, String>,
    #[serde(default)]
    classes: Vec<RawTerm>,
    #[serde(default)]
    object_properties: Vec<RawTerm>,
    #[serde(default)]
    data_properties: Vec<RawTerm>,
    #[serde(default)]
    individuals: Vec<RawTerm>,
}

impl TermManifest {
    pub fn from_json(text: &str) -> Result<Self, ProfileError> {
        let raw: RawManifest =
            serde_json::from_str(text).map_err(|e| ProfileError::Manifest(e.to_string()))?;
        let mut sources = BTreeMap::new();
        for (id, s) in raw.sources {
            let namespace = Iri::new(&s.namespace).map_err(|_| {
                ProfileError::Manifest(format!(
                    "source '{id}' has invalid namespace {:?}",
                    s.namespace
                ))
            })?;
            sources.insert(
                id,
                SourceDecl {
                    namespace,
                    path: s.path,
                    version: s.version,
                },
            );
        }
        let expand = |curie: &str| -> Result<Iri, ProfileError> {
            let bad = || ProfileError::Manifest(format!("cannot expand term {curie:?}"));
            if let Some(inner) = curie.strip_prefix('<').and_then(|c| c.strip_suffix('>')) {
                return Iri::new(inner).map_err(|_| bad());
            }
            if curie.contains("://") {
                return Iri::new(curie).map_err(|_| bad());
            }
            let (prefix, local) = curie.split_once(':').ok_or_else(bad)?;
            let ns = match sources.get(prefix) {
                Some(s) => s.namespace.as_str().to_string(),
                None => raw.prefixes.get(prefix).cloned().ok_or_else(bad)?,
            };
            Iri::new(format!("{ns}{local}")).map_err(|_| bad())
        };
        let mut m = TermManifest {
            sources: sources.clone(),
            ..Default::default()
        };
        for (cat, list) in [
            (Category::Class, raw.classes),
            (Category::ObjectProperty, raw.object_properties),
            (Category::DataProperty, raw.data_properties),
            (Category::Individual, raw.individuals),
        ] {
            for t in list {
                let iri = expand(&t.iri)?;
                m.list_mut(cat).push(SelectedTerm {
                    iri,
                    source: t.source,
                });
            }
        }
        m.validate()?;
        Ok(m)
    }

    /// Reads a manifest file.
    pub fn load(path: &Path) -> Result<Self, ProfileError> {
        let text = std::fs::read_to_string(path).map_err(|e| ProfileError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let raw = RawManifest {
            sources: self
                .sources
                .iter()
                .map(|(id, s)| {
                    (
                        id.clone(),
                        RawSource {
                            namespace: s.namespace.as_str().to_string(),
                            path: s.path.clone(),
                            version: s.version.clone(),
                        },
                    )
                })
                .collect(),
            prefixes: BTreeMap::new(),
            classes: raw_terms(&self.classes),
            object_properties: raw_terms(&self.object_properties),
            data_properties: raw_terms(&self.data_properties),
            individuals: raw_terms(&self.individuals),
        };
        let mut s = serde_json::to_string_pretty(&raw).expect("manifest serialize");
        s.push('\n');
        s
    }

    pub fn list(&self, cat: Category) -> &[SelectedTerm] {
        match cat {
            Category::Class => &self.classes,
            Category::ObjectProperty => &self.object_properties,
            Category::DataProperty => &self.data_properties,
            Category::Individual => &self.individuals,
        }
    }

    fn list_mut(&mut self, cat: Category) -> &mut Vec<SelectedTerm> {
        match cat {
            Category::Class => &mut self.classes,
            Category::ObjectProperty => &mut self.object_properties,
            Category::DataProperty => &mut self.data_properties,
            Category::Individual => &mut self.individuals,
        }
    }

    /// All terms with their category, category by category.
    pub fn terms(&self) -> impl Iterator<Item = (Category, &SelectedTerm)> {
        Category::ALL
            .into_iter()
            .flat_map(move |c| self.list(c).iter().map(move |t| (c, t)))
    }

    pub fn term_set(&self) -> BTreeSet<Iri> {
        self.terms().map(|(_, t)| t.iri.clone()).collect()
    }

    pub fn category_set(&self, cat: Category) -> BTreeSet<Iri> {
        self.list(cat).iter().map(|t| t.iri.clone()).collect()
    }

    /// Object and data properties together.
    pub fn property_set(&self) -> BTreeSet<Iri> {
        let mut s = self.category_set(Category::ObjectProperty);
        s.extend(self.category_set(Category::DataProperty));
        s
    }

    pub fn is_empty(&self) -> bool {
        self.terms().next().is_none()
    }

    pub fn stats(&self) -> ProfileStats {
        ProfileStats {
            classes: self.category_set(Category::Class).len(),
            object_properties: self.category_set(Category::ObjectProperty).len(),
            data_properties: self.category_set(Category::DataProperty).len(),
            individuals: self.category_set(Category::Individual).len(),
        }
    }

    /// Checks the manifest invariants: no duplicate terms, declared
    /// sources only, and every term inside its source's namespace.
    pub fn validate(&self) -> Result<(), ProfileError> {
        let mut seen = BTreeSet::new();
        for (_, t) in self.terms() {
            if !seen.insert(&t.iri) {
                return Err(ProfileError::DuplicateTerm(t.iri.clone()));
            }
            let src = self
                .sources
                .get(&t.source)
                .ok_or_else(|| ProfileError::UnknownSource {
                    term: t.iri.clone(),
                    source_id: t.source.clone(),
                })?;
            if !t.iri.as_str().starts_with(src.namespace.as_str()) {
                return Err(ProfileError::NamespaceMismatch {
                    term: t.iri.clone(),
                    namespace: src.namespace.clone(),
                });
            }
        }
        Ok(())
    }

    /// Set union per category. Terms already present keep their
    /// position; new ones are appended in `other`'s order.
    pub fn union(&self, other: &TermManifest) -> Result<TermManifest, ProfileError> {
        let mut out = self.clone();
        for (id, s) in &other.sources {
            match out.sources.get(id) {
                Some(existing) if existing.namespace != s.namespace => {
                    return Err(ProfileError::SourceConflict {
                        source_id: id.clone(),
                        first: existing.namespace.clone(),
                        second: s.namespace.clone(),
                    })
                }
                Some(_) => {}
                None => {
                    out.sources.insert(id.clone(), s.clone());
                }
            }
        }
        let mut placed: BTreeMap<Iri, Category> =
            out.terms().map(|(c, t)| (t.iri.clone(), c)).collect();
        for (cat, t) in other.terms() {
            match placed.get(&t.iri) {
                Some(c) if *c == cat => {}
                Some(c) => {
                    return Err(ProfileError::Manifest(format!(
                        "{} is listed as {c} and as {cat}",
                        t.iri
                    )))
                }
                None => {
                    placed.insert(t.iri.clone(), cat);
                    out.list_mut(cat).push(t.clone());
                }
            }
        }
        out.validate()?;
        Ok(out)
    }
}

fn raw_terms(list: &[SelectedTerm]) -> Vec<RawTerm> {
    list.iter()
        .map(|t| RawTerm {
            iri: t.iri.as_str().to_string(),
            source: t.source.clone(),
        })
        .collect()
}
