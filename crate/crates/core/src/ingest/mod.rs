//! Parsing and binding of the object catalogue and process log tables.

mod records;
mod table;
mod vocab;

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;

use crate::rdf::Iri;

pub use records::{
    format_date_time, parse_bound, Collection, CreationActivity, Device, Identifier, IngestError,
    InvertedBounds, License, ObjectRecord, ParentWork, ProcessRecord, Stage, TimeSpan, Title,
    TitleKind,
};
pub use table::{
    parse_table, split_cell, RawRow, Schema, TableError, OBJECT_COLUMNS, PROCESS_COLUMNS,
};
pub use vocab::{VocabularyError, VocabularyTable};

/// Sub-field separator inside compound entries such as
/// `agent|role|technique`.
pub const SUBFIELD_DELIMITER: char = '|';

/// Multi-entity delimiters: one default plus per-column overrides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitRules {
    pub default: char,
    pub per_column: BTreeMap<String, char>,
}

impl Default for SplitRules {
    fn default() -> Self {
        SplitRules {
            default: ';',
            per_column: BTreeMap::new(),
        }
    }
}

impl SplitRules {
    pub fn with_default(delimiter: char) -> Self {
        SplitRules {
            default: delimiter,
            ..Default::default()
        }
    }

    pub fn delimiter(&self, column: &str) -> char {
        self.per_column.get(column).copied().unwrap_or(self.default)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Records {
    Objects(Vec<ObjectRecord>),
    Processes(Vec<ProcessRecord>),
}

/// Binds raw rows of either schema.
pub fn bind_records(
    rows: &[RawRow],
    schema: Schema,
    vocab: &VocabularyTable,
    rules: &SplitRules,
) -> (Records, Vec<IngestError>) {
    match schema {
        Schema::Object => {
            let (r, e) = bind_objects(rows, vocab, rules);
            (Records::Objects(r), e)
        }
        Schema::Process => {
            let (r, e) = bind_processes(rows, vocab, rules);
            (Records::Processes(r), e)
        }
    }
}

struct Row<'a> {
    raw: &'a RawRow,
    schema: Schema,
    vocab: &'a VocabularyTable,
    rules: &'a SplitRules,
}

type Bound<T> = Result<T, IngestError>;

impl<'a> Row<'a> {
    fn cell(&self, column: &str) -> &'a str {
        self.raw.cell(self.schema, column).trim()
    }

    fn optional(&self, column: &str) -> Option<String> {
        Some(self.cell(column))
            .filter(|c| !c.is_empty())
            .map(str::to_string)
    }

    fn required(&self, column: &str) -> Bound<String> {
        self.optional(column)
            .ok_or_else(|| IngestError::MissingRequired {
                row: self.raw.line,
                column: column.to_string(),
            })
    }

    fn list(&self, column: &str) -> Vec<String> {
        split_cell(self.cell(column), self.rules.delimiter(column))
    }

    fn term(&self, column: &str, token: &str) -> Bound<Iri> {
        self.vocab
            .resolve(token)
            .cloned()
            .ok_or_else(|| IngestError::UnknownVocabularyToken {
                row: self.raw.line,
                column: column.to_string(),
                token: token.trim().to_string(),
            })
    }

    fn violation(&self, message: impl Into<String>) -> IngestError {
        IngestError::InvariantViolation {
            row: self.raw.line,
            message: message.into(),
        }
    }

    /// Splits a compound entry into `min..=max` sub-fields.
    fn subfields(&self, column: &str, entry: &str, min: usize, max: usize) -> Bound<Vec<String>> {
        let parts: Vec<String> = entry
            .split(SUBFIELD_DELIMITER)
            .map(|p| p.trim().to_string())
            .collect();
        if parts.len() < min || parts.len() > max || parts[..min].iter().any(String::is_empty) {
            return Err(self.violation(format!("malformed entry {entry:?} in column {column}")));
        }
        Ok(parts)
    }

    fn license(&self, statement_col: &str, url_col: &str) -> Bound<Option<License>> {
        match (self.optional(statement_col), self.optional(url_col)) {
            (None, None) => Ok(None),
            (Some(statement), Some(url)) => {
                let document = Iri::new(&url).map_err(|_| {
                    self.violation(format!("{url_col} {url:?} is not an absolute IRI"))
                })?;
                Ok(Some(License {
                    statement,
                    document,
                }))
            }
            (Some(_), None) => Err(IngestError::MissingRequired {
                row: self.raw.line,
                column: url_col.to_string(),
            }),
            (None, Some(_)) => Err(IngestError::MissingRequired {
                row: self.raw.line,
                column: statement_col.to_string(),
            }),
        }
    }

    fn object(&self) -> Bound<ObjectRecord> {
        let object_id = self.required("object_id")?;
        let mut titles = Vec::new();
        for (column, kind) in [
            ("original_title", TitleKind::Original),
            ("exhibition_title", TitleKind::Exhibition),
        ] {
            titles.extend(
                self.list(column)
                    .into_iter()
                    .map(|text| Title { text, kind }),
            );
        }
        if !titles.iter().any(|t| t.kind == TitleKind::Original) {
            self.required("original_title")?;
        }
        let parent_work = match self.optional("parent_work") {
            None => None,
            Some(key) => {
                let token = self.required("parent_work_type")?;
                Some(ParentWork {
                    key,
                    work_type: self.term("parent_work_type", &token)?,
                })
            }
        };
        let date = self.required("date")?;
        let timespan = TimeSpan::from_cell(&date)
            .map_err(|_| self.violation(format!("date {date:?} ends before it begins")))?;
        let mut creation_activities = Vec::new();
        for entry in self.list("creators") {
            let parts = self.subfields("creators", &entry, 2, 3)?;
            let technique = match parts.get(2).filter(|t| !t.is_empty()) {
                Some(t) => Some(self.term("creators", t)?),
                None => None,
            };
            creation_activities.push(CreationActivity {
                agent: parts[0].clone(),
                role: self.term("creators", &parts[1])?,
                technique,
            });
        }
        let subjects = self.list("subjects");
        let token = self.required("manifestation_type")?;
        let manifestation_type = self.term("manifestation_type", &token)?;
        self.required("license_statement")?;
        self.required("license_url")?;
        let license = self
            .license("license_statement", "license_url")?
            .expect("both cells present");
        let item_description = self.optional("description");
        let mut identifiers = Vec::new();
        for entry in self.list("identifiers") {
            let parts = self.subfields("identifiers", &entry, 2, 2)?;
            identifiers.push(Identifier {
                value: parts[0].clone(),
                id_type: self.term("identifiers", &parts[1])?,
            });
        }
        let depicts = self.list("depicts");
        let keeper = self.optional("keeper");
        let collection = match self.optional("collection") {
            Some(name) => Some(Collection {
                name,
                place: self.required("collection_place")?,
            }),
            None if self.optional("collection_place").is_some() => {
                return Err(self.violation("collection_place given without a collection"))
            }
            None => None,
        };
        let components = self.list("components");
        for (column, keys) in [("depicts", &depicts), ("components", &components)] {
            if keys.contains(&object_id) {
                return Err(self.violation(format!("{column} refers to the object itself")));
            }
        }
        Ok(ObjectRecord {
            object_id,
            titles,
            parent_work,
            timespan,
            creation_activities,
            subjects,
            manifestation_type,
            license,
            item_description,
            identifiers,
            depicts,
            keeper,
            collection,
            components,
        })
    }

    fn process(&self) -> Bound<ProcessRecord> {
        let stage_token = self.required("stage")?;
        let stage = if stage_token.eq_ignore_ascii_case("acquisition") {
            Stage::Acquisition
        } else {
            Stage::Software(self.term("stage", &stage_token)?)
        };
        let object_id = self.required("object_id")?;
        let input_data = self.optional("input_data");
        match (&stage, &input_data) {
            (Stage::Acquisition, Some(_)) => {
                return Err(self.violation("acquisition stage must not have input_data"))
            }
            (Stage::Software(_), None) => {
                return Err(self.violation("software stage requires exactly one input_data"))
            }
            (Stage::Software(_), Some(i))
                if split_cell(i, self.rules.delimiter("input_data")).len() != 1 =>
            {
                return Err(self.violation("software stage requires exactly one input_data"))
            }
            _ => {}
        }
        let output_data = self.required("output_data")?;
        if input_data.as_ref() == Some(&output_data) {
            return Err(self.violation("input_data and output_data are the same"));
        }
        let start = self.required("start")?;
        let begin = parse_bound(&start, false).ok_or_else(|| {
            self.violation(format!("start {start:?} is not an ISO-8601 date-time"))
        })?;
        let end_cell = self.required("end")?;
        let end = parse_bound(&end_cell, true).ok_or_else(|| {
            self.violation(format!("end {end_cell:?} is not an ISO-8601 date-time"))
        })?;
        let timespan =
            TimeSpan::exact(begin, end).map_err(|_| self.violation("end precedes start"))?;
        let persons = self.list("persons");
        let groups = self.list("groups");
        let techniques = self
            .list("techniques")
            .iter()
            .map(|t| self.term("techniques", t))
            .collect::<Bound<Vec<_>>>()?;
        let mut devices = Vec::new();
        for entry in self.list("devices") {
            let parts = self.subfields("devices", &entry, 2, 2)?;
            devices.push(Device {
                name: parts[0].clone(),
                device_type: self.term("devices", &parts[1])?,
            });
        }
        let software = self.optional("software");
        if matches!(stage, Stage::Acquisition) && software.is_some() {
            return Err(self.violation("acquisition stage must not name software"));
        }
        let output_license = self.license("output_license_statement", "output_license_url")?;
        Ok(ProcessRecord {
            stage,
            object_id,
            input_data,
            output_data,
            timespan,
            persons,
            groups,
            techniques,
            devices,
            software,
            output_license,
        })
    }
}

fn bind_rows<T: Send>(
    rows: &[RawRow],
    schema: Schema,
    vocab: &VocabularyTable,
    rules: &SplitRules,
    bind: impl Fn(&Row) -> Bound<T> + Sync,
    key: impl Fn(&T) -> (&'static str, String),
) -> (Vec<T>, Vec<IngestError>) {
    let bound: Vec<Bound<T>> = rows
        .par_iter()
        .map(|raw| {
            bind(&Row {
                raw,
                schema,
                vocab,
                rules,
            })
        })
        .collect();
    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut keys = HashSet::new();
    for (raw, result) in rows.iter().zip(bound) {
        match result {
            Ok(rec) => {
                let (column, k) = key(&rec);
                if keys.insert(k.clone()) {
                    records.push(rec);
                } else {
                    errors.push(IngestError::DuplicateKey {
                        row: raw.line,
                        column: column.to_string(),
                        key: k,
                    });
                }
            }
            Err(e) => errors.push(e),
        }
    }
    (records, errors)
}

/// Binds object rows. Rejected rows contribute exactly one error each;
/// output order follows input order.
pub fn bind_objects(
    rows: &[RawRow],
    vocab: &VocabularyTable,
    rules: &SplitRules,
) -> (Vec<ObjectRecord>, Vec<IngestError>) {
    bind_rows(
        rows,
        Schema::Object,
        vocab,
        rules,
        |r| r.object(),
        |r| ("object_id", r.object_id.clone()),
    )
}

/// Binds process rows. `output_data` keys must be unique since each
/// names the data object a stage produced.
pub fn bind_processes(
    rows: &[RawRow],
    vocab: &VocabularyTable,
    rules: &SplitRules,
) -> (Vec<ProcessRecord>, Vec<IngestError>) {
    bind_rows(
        rows,
        Schema::Process,
        vocab,
        rules,
        |r| r.process(),
        |r| ("output_data", r.output_data.clone()),
    )
}
