use std::fmt;

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use serde::Serialize;

use crate::rdf::Iri;

/// Creation or process time span. Either both bounds, or a fuzzy label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeSpan {
    pub begin: Option<NaiveDateTime>,
    pub end: Option<NaiveDateTime>,
    pub fuzzy: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvertedBounds;

impl TimeSpan {
    pub fn exact(begin: NaiveDateTime, end: NaiveDateTime) -> Result<Self, InvertedBounds> {
        if begin > end {
            return Err(InvertedBounds);
        }
        Ok(TimeSpan {
            begin: Some(begin),
            end: Some(end),
            fuzzy: None,
        })
    }

    pub fn fuzzy(label: impl Into<String>) -> Self {
        TimeSpan {
            begin: None,
            end: None,
            fuzzy: Some(label.into()),
        }
    }

    pub fn bounds(&self) -> Option<(NaiveDateTime, NaiveDateTime)> {
        self.begin.zip(self.end)
    }

    /// Interprets a date cell. `YYYY-MM-DD` covers the whole day,
    /// `YYYY-MM-DDThh:mm:ss` is an instant, `A/B` is an interval of the
    /// two; anything else is kept as a fuzzy label.
    pub fn from_cell(cell: &str) -> Result<Self, InvertedBounds> {
        let cell = cell.trim();
        let parsed = match cell.split_once('/') {
            Some((a, b)) => parse_bound(a.trim(), false).zip(parse_bound(b.trim(), true)),
            None => parse_bound(cell, false).zip(parse_bound(cell, true)),
        };
        match parsed {
            Some((b, e)) => TimeSpan::exact(b, e),
            None => Ok(TimeSpan::fuzzy(cell)),
        }
    }
}

fn is_date_shape(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 10
        && b.iter().enumerate().all(|(i, c)| match i {
            4 | 7 => *c == b'-',
            _ => c.is_ascii_digit(),
        })
}

/// Parses a strict ISO-8601 date or date-time. Dates resolve to the
/// start of the day, or to its last second when `end_of_day` is set.
pub fn parse_bound(s: &str, end_of_day: bool) -> Option<NaiveDateTime> {
    if is_date_shape(s) {
        let d = NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()?;
        let t = if end_of_day {
            NaiveTime::from_hms_opt(23, 59, 59)?
        } else {
            NaiveTime::MIN
        };
        return Some(d.and_time(t));
    }
    if s.len() == 19 && s.as_bytes()[10] == b'T' && is_date_shape(&s[..10]) {
        return NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S").ok();
    }
    None
}

/// Lexical form used for date-time literals.
pub fn format_date_time(t: &NaiveDateTime) -> String {
    t.format("%Y-%m-%dT%H:%M:%S").to_string()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TitleKind {
    Original,
    Exhibition,
}

impl fmt::Display for TitleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TitleKind::Original => "original",
            TitleKind::Exhibition => "exhibition",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Title {
    pub text: String,
    pub kind: TitleKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParentWork {
    pub key: String,
    pub work_type: Iri,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CreationActivity {
    pub agent: String,
    pub role: Iri,
    pub technique: Option<Iri>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct License {
    pub statement: String,
    pub document: Iri,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identifier {
    pub value: String,
    pub id_type: Iri,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collection {
    pub name: String,
    pub place: String,
}

/// One row of the object catalogue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectRecord {
    pub object_id: String,
    pub titles: Vec<Title>,
    pub parent_work: Option<ParentWork>,
    pub timespan: TimeSpan,
    pub creation_activities: Vec<CreationActivity>,
    pub subjects: Vec<String>,
    pub manifestation_type: Iri,
    pub license: License,
    pub item_description: Option<String>,
    pub identifiers: Vec<Identifier>,
    pub depicts: Vec<String>,
    pub keeper: Option<String>,
    pub collection: Option<Collection>,
    pub components: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stage {
    Acquisition,
    Software(Iri),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Device {
    pub name: String,
    pub device_type: Iri,
}

/// One row of the process log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessRecord {
    pub stage: Stage,
    pub object_id: String,
    pub input_data: Option<String>,
    pub output_data: String,
    pub timespan: TimeSpan,
    pub persons: Vec<String>,
    pub groups: Vec<String>,
    pub techniques: Vec<Iri>,
    pub devices: Vec<Device>,
    pub software: Option<String>,
    pub output_license: Option<License>,
}

/// A row-level ingest failure. `row` is the 1-based line of the row in
/// its CSV file (the header is line 1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind")]
pub enum IngestError {
    #[error("row {row}, column {column}: unknown vocabulary token {token:?}")]
    UnknownVocabularyToken {
        row: u64,
        column: String,
        token: String,
    },
    #[error("row {row}, column {column}: value required")]
    MissingRequired { row: u64, column: String },
    #[error("row {row}: {message}")]
    InvariantViolation { row: u64, message: String },
    #[error("row {row}: duplicate key {key:?} in column {column}")]
    DuplicateKey {
        row: u64,
        column: String,
        key: String,
    },
}

impl IngestError {
    pub fn row(&self) -> u64 {
        match self {
            IngestError::UnknownVocabularyToken { row, .. }
            | IngestError::MissingRequired { row, .. }
            | IngestError::InvariantViolation { row, .. }
            | IngestError::DuplicateKey { row, .. } => *row,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn date_cells() {
        let t = TimeSpan::from_cell("16th century").unwrap();
        assert_eq!(t.fuzzy.as_deref(), Some("16th century"));
        assert!(t.bounds().is_none());
        let t = TimeSpan::from_cell("1580-05-12").unwrap();
        let (b, e) = t.bounds().unwrap();
        assert_eq!(format_date_time(&b), "1580-05-12T00:00:00");
        assert_eq!(format_date_time(&e), "1580-05-12T23:59:59");
        let t = TimeSpan::from_cell("1550-01-01/1560-12-31T10:00:00").unwrap();
        assert_eq!(format_date_time(&t.end.unwrap()), "1560-12-31T10:00:00");
        assert!(TimeSpan::from_cell("1599").unwrap().fuzzy.is_some());
        assert!(TimeSpan::from_cell("1599-13-01").unwrap().fuzzy.is_some());
        assert_eq!(
            TimeSpan::from_cell("1600-01-01/1599-01-01"),
            Err(InvertedBounds)
        );
    }
}
