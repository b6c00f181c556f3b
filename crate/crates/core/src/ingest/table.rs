use std::io::Read;

use serde::Serialize;

/// The two tabular datasets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Schema {
    Object,
    Process,
}

pub const OBJECT_COLUMNS: [&str; 18] = [
    "object_id",
    "original_title",
    "exhibition_title",
    "parent_work",
    "parent_work_type",
    "date",
    "creators",
    "subjects",
    "manifestation_type",
    "license_statement",
    "license_url",
    "description",
    "identifiers",
    "depicts",
    "keeper",
    "collection",
    "collection_place",
    "components",
];

pub const PROCESS_COLUMNS: [&str; 13] = [
    "stage",
    "object_id",
    "input_data",
    "output_data",
    "start",
    "end",
    "persons",
    "groups",
    "techniques",
    "devices",
    "software",
    "output_license_statement",
    "output_license_url",
];

impl Schema {
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Schema::Object => &OBJECT_COLUMNS,
            Schema::Process => &PROCESS_COLUMNS,
        }
    }

    pub fn column_index(self, name: &str) -> Option<usize> {
        self.columns().iter().position(|c| *c == name)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("header mismatch: expected [{}], found [{}]", .expected.join(","), .found.join(","))]
    HeaderMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("CSV syntax error at line {line}: {message}")]
    CsvSyntax { line: u64, message: String },
}

/// One data row: its 1-based line number in the file and its cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawRow {
    pub line: u64,
    pub cells: Vec<String>,
}

impl RawRow {
    pub fn cell(&self, schema: Schema, column: &str) -> &str {
        let i = schema.column_index(column).expect("known column");
        self.cells.get(i).map(String::as_str).unwrap_or("")
    }
}

fn csv_error(e: csv::Error) -> TableError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    let message = match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => {
            format!("expected {expected_len} fields, found {len}")
        }
        csv::ErrorKind::Utf8 { .. } => "invalid UTF-8".to_string(),
        _ => e.to_string(),
    };
    TableError::CsvSyntax { line, message }
}

/// Reads an RFC 4180 table whose header must equal the schema's columns.
pub fn parse_table<R: Read>(input: R, schema: Schema) -> Result<Vec<RawRow>, TableError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(input);
    let found: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(|h| h.trim_start_matches('\u{feff}').to_string())
        .collect();
    let expected: Vec<String> = schema.columns().iter().map(|c| c.to_string()).collect();
    if found != expected {
        return Err(TableError::HeaderMismatch { expected, found });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        rows.push(RawRow {
            line,
            cells: record.iter().map(str::to_string).collect(),
        });
    }
    Ok(rows)
}

/// Splits a multi-entity cell on `delimiter`, trimming entries and
/// dropping empty ones.
pub fn split_cell(cell: &str, delimiter: char) -> Vec<String> {
    cell.split(delimiter)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(schema: Schema) -> String {
        schema.columns().join(",") + "\n"
    }

    #[test]
    fn header_only_is_empty() {
        let rows = parse_table(header(Schema::Process).as_bytes(), Schema::Process).unwrap();
        assert!(rows.is_empty());
    }

    #[test]
    fn quoted_delimiter_survives() {
        let doc = header(Schema::Process) + "acquisition,\"a,b\",,,,,,,,,,,\n";
        let rows = parse_table(doc.as_bytes(), Schema::Process).unwrap();
        assert_eq!(rows[0].cells[1], "a,b");
        assert_eq!(rows[0].line, 2);
    }

    #[test]
    fn header_mismatch() {
        let err = parse_table("a,b\n".as_bytes(), Schema::Object).unwrap_err();
        assert!(matches!(err, TableError::HeaderMismatch { .. }));
    }

    #[test]
    fn ragged_row_is_syntax_error() {
        let doc = header(Schema::Process) + "acquisition\n";
        let err = parse_table(doc.as_bytes(), Schema::Process).unwrap_err();
        assert!(matches!(err, TableError::CsvSyntax { line: 2, .. }));
    }

    #[test]
    fn split_rule() {
        assert!(split_cell("", ';').is_empty());
        assert_eq!(split_cell("A Person", ';'), ["A Person"]);
        assert_eq!(split_cell("P1; P2 ;P3", ';'), ["P1", "P2", "P3"]);
        assert_eq!(split_cell(" ; ;", ';'), Vec::<String>::new());
    }
}
