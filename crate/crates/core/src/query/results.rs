use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::QueryError;
use crate::rdf::{parse_ntriples_term, Term};

/// Query results: a header of variable names and rows of terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ResultTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Term>>,
}

impl ResultTable {
    /// Tab-separated values: `?var` header, then one N-Triples term per cell.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.header.iter().map(|v| format!("?{v}")).collect();
        out.push_str(&header.join("\t"));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Term::to_string).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}

/// Reads an expected-results file in the format written by `to_tsv`.
pub fn parse_tsv(text: &str) -> Result<ResultTable, QueryError> {
    let malformed = |line, message: String| QueryError::ExpectedFileMalformed { line, message };
    let mut lines = text.lines().enumerate();
    let (_, head) = lines
        .next()
        .ok_or_else(|| malformed(1, "missing header row".into()))?;
    let mut header = Vec::new();
    for cell in head.split('\t') {
        match cell.trim().strip_prefix('?') {
            Some(v) if !v.is_empty() => header.push(v.to_string()),
            _ => {
                return Err(malformed(
                    1,
                    format!("header cell {cell:?} is not a variable"),
                ))
            }
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != header.len() {
            return Err(malformed(
                i + 1,
                format!("expected {} cells, found {}", header.len(), cells.len()),
            ));
        }
        let row = cells
            .iter()
            .map(|c| parse_ntriples_term(c.trim()).map_err(|e| malformed(i + 1, e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(ResultTable { header, rows })
}

/// Differences between an actual and an expected table.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ResultDiff {
    pub header_mismatch: Option<(Vec<String>, Vec<String>)>,
    pub missing: Vec<Vec<Term>>,
    pub surplus: Vec<Vec<Term>>,
    pub order_mismatch: bool,
}

impl ResultDiff {
    pub fn is_empty(&self) -> bool {
        self.header_mismatch.is_none()
            && self.missing.is_empty()
            && self.surplus.is_empty()
            && !self.order_mismatch
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some((actual, expected)) = &self.header_mismatch {
            let _ = writeln!(out, "header: expected {expected:?}, found {actual:?}");
        }
        for (tag, rows) in [("missing", &self.missing), ("surplus", &self.surplus)] {
            for r in rows {
                let cells: Vec<String> = r.iter().map(Term::to_string).collect();
                let _ = writeln!(out, "{tag}: {}", cells.join("\t"));
            }
        }
        if self.order_mismatch {
            out.push_str("rows match but are in a different order\n");
        }
        out
    }
}

fn counts(rows: &[Vec<Term>]) -> BTreeMap<&Vec<Term>, usize> {
    let mut m = BTreeMap::new();
    for r in rows {
        *m.entry(r).or_insert(0) += 1;
    }
    m
}

/// Compares row multisets, and additionally row order when `ordered`.
pub fn compare_results(actual: &ResultTable, expected: &ResultTable, ordered: bool) -> ResultDiff {
    let mut diff = ResultDiff::default();
    if actual.header != expected.header {
        diff.header_mismatch = Some((actual.header.clone(), expected.header.clone()));
    }
    let (a, e) = (counts(&actual.rows), counts(&expected.rows));
    for (row, n) in &e {
        let have = a.get(row).copied().unwrap_or(0);
        diff.missing
            .extend(std::iter::repeat_n((*row).clone(), n.saturating_sub(have)));
    }
    for (row, n) in &a {
        let want = e.get(row).copied().unwrap_or(0);
        diff.surplus
            .extend(std::iter::repeat_n((*row).clone(), n.saturating_sub(want)));
    }
    if ordered && diff.missing.is_empty() && diff.surplus.is_empty() {
        diff.order_mismatch = actual.rows != expected.rows;
    }
    diff
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{Iri, Literal};

    fn table(rows: &[&str]) -> ResultTable {
        ResultTable {
            header: vec!["x".into(), "n".into()],
            rows: rows
                .iter()
                .map(|r| {
                    vec![
                        Term::Iri(Iri::new(format!("http://e/{r}")).unwrap()),
                        Term::Literal(Literal::string(format!("name\t{r}"))),
                    ]
                })
                .collect(),
        }
    }

    #[test]
    fn tsv_round_trip() {
        let t = table(&["a", "b"]);
        assert_eq!(parse_tsv(&t.to_tsv()).unwrap(), t);
        assert!(parse_tsv("x\n").is_err());
        assert!(matches!(
            parse_tsv("?x\n<http://e/a>\t<http://e/b>\n"),
            Err(QueryError::ExpectedFileMalformed { line: 2, .. })
        ));
    }

    #[test]
    fn diffs() {
        assert!(compare_results(&table(&["a", "b"]), &table(&["a", "b"]), false).is_empty());
        let d = compare_results(&table(&["a"]), &table(&["a", "b"]), false);
        assert_eq!(d.missing.len(), 1);
        assert!(d.surplus.is_empty());
        let d = compare_results(&table(&["a", "b", "b"]), &table(&["a", "b"]), false);
        assert_eq!(d.surplus.len(), 1);
        assert!(compare_results(&table(&["b", "a"]), &table(&["a", "b"]), false).is_empty());
        assert!(compare_results(&table(&["b", "a"]), &table(&["a", "b"]), true).order_mismatch);
    }
}
