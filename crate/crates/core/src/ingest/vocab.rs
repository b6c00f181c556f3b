use std::collections::BTreeMap;
use std::io::Read;

use crate::rdf::Iri;

#[derive(Debug, thiserror::Error)]
pub enum VocabularyError {
    #[error("vocabulary line {line}: {message}")]
    Invalid { line: u64, message: String },
    #[error("vocabulary token {0:?} is listed twice")]
    DuplicateToken(String),
}

/// Human-readable tokens mapped to controlled-vocabulary IRIs.
/// Tokens are matched case-insensitively after trimming.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VocabularyTable {
    map: BTreeMap<String, Iri>,
}

fn normalize(token: &str) -> String {
    token.trim().to_lowercase()
}

impl VocabularyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, token: &str, iri: Iri) -> Result<(), VocabularyError> {
        let key = normalize(token);
        if self.map.contains_key(&key) {
            return Err(VocabularyError::DuplicateToken(key));
        }
        self.map.insert(key, iri);
        Ok(())
    }

    /// Reads a `token,iri` CSV table.
    pub fn from_csv<R: Read>(input: R) -> Result<Self, VocabularyError> {
        let mut reader = csv::Reader::from_reader(input);
        let invalid = |line, message: String| VocabularyError::Invalid { line, message };
        let headers = reader.headers().map_err(|e| invalid(1, e.to_string()))?;
        if headers.iter().collect::<Vec<_>>() != ["token", "iri"] {
            return Err(invalid(1, "header must be token,iri".into()));
        }
        let mut table = Self::new();
        for record in reader.records() {
            let record = record
                .map_err(|e| invalid(e.position().map(|p| p.line()).unwrap_or(0), e.to_string()))?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let iri = Iri::new(record[1].trim()).map_err(|e| invalid(line, e.to_string()))?;
            table.insert(&record[0], iri)?;
        }
        Ok(table)
    }

    pub fn resolve(&self, token: &str) -> Option<&Iri> {
        self.map.get(&normalize(token))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Iri)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_insensitive_and_injective() {
        let t = VocabularyTable::from_csv(
            "token,iri\nPhotogrammetry,http://vocab.getty.edu/aat/300053580\n".as_bytes(),
        )
        .unwrap();
        assert_eq!(
            t.resolve(" photogrammetry ").unwrap().as_str(),
            "http://vocab.getty.edu/aat/300053580"
        );
        let dup = "token,iri\na,http://e/1\nA,http://e/2\n";
        assert!(matches!(
            VocabularyTable::from_csv(dup.as_bytes()),
            Err(VocabularyError::DuplicateToken(_))
        ));
    }
}
