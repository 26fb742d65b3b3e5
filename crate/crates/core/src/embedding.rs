//! Static word embeddings: the table `word -> vector` plus the unknown-token
//! fallback vector.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbeddingError {
    #[error("line {line}: expected {expected} components, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("embedding source contains no data lines")]
    EmptyTable,
    #[error("line {line}: duplicate word {word:?}")]
    DuplicateWord { line: usize, word: String },
    #[error("header declares {declared_count} x {declared_dim}, parsed {count} x {dim}")]
    HeaderMismatch { declared_count: usize, declared_dim: usize, count: usize, dim: usize },
}

/// The static embedding function with out-of-vocabulary fallback.
///
/// Vectors are stored contiguously, one row of `dim` floats per word.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticEmbeddingTable {
    dim: usize,
    rows: BTreeMap<String, usize>,
    data: Vec<f32>,
    unknown: Vec<f32>,
}

impl StaticEmbeddingTable {
    /// Builds a table from explicit entries. Returns `None` if `dim == 0`,
    /// a key is empty or contains whitespace, a key repeats, or any vector has
    /// the wrong length.
    pub fn from_entries<I, S>(dim: usize, entries: I, unknown: Option<Vec<f32>>) -> Option<Self>
    where
        I: IntoIterator<Item = (S, Vec<f32>)>,
        S: Into<String>,
    {
        if dim == 0 {
            return None;
        }
        let mut table = StaticEmbeddingTable {
            dim,
            rows: BTreeMap::new(),
            data: Vec::new(),
            unknown: unknown.unwrap_or_else(|| vec![0.0; dim]),
        };
        if table.unknown.len() != dim {
            return None;
        }
        for (word, vector) in entries {
            let word = word.into();
            if !valid_word(&word) || vector.len() != dim || table.rows.contains_key(&word) {
                return None;
            }
            table.push(word, &vector);
        }
        Some(table)
    }

    /// Parses the whitespace-separated text format from an iterator of lines.
    ///
    /// Lines that are empty or start with `#` are ignored. A first data line
    /// made of exactly two integers is taken as a `COUNT DIM` header and
    /// checked against the parsed content. If `unknown_token` names a word in
    /// the source its vector becomes the fallback (and stays a regular
    /// entry); otherwise the fallback is the zero vector.
    pub fn parse_lines<'a, I>(lines: I, unknown_token: Option<&str>) -> Result<Self, EmbeddingError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut parser = TableParser::new();
        for (idx, line) in lines.into_iter().enumerate() {
            parser.push_line(idx + 1, line)?;
        }
        parser.finish(unknown_token)
    }

    fn push(&mut self, word: String, vector: &[f32]) {
        let row = self.rows.len();
        self.rows.insert(word, row);
        self.data.extend_from_slice(vector);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn unknown_vector(&self) -> &[f32] {
        &self.unknown
    }

    /// Returns the stored vector for `word`, if present.
    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.rows.get(word).map(|&row| &self.data[row * self.dim..(row + 1) * self.dim])
    }

    pub fn contains(&self, word: &str) -> bool {
        self.rows.contains_key(word)
    }

    /// `f(word)`: the stored vector, or the unknown-token vector for
    /// out-of-vocabulary input. Never fails.
    pub fn lookup(&self, word: &str) -> &[f32] {
        self.get(word).unwrap_or(&self.unknown)
    }

    /// Words in byte order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }
}

fn valid_word(word: &str) -> bool {
    !word.is_empty() && !word.chars().any(char::is_whitespace)
}

fn is_separator(c: char) -> bool {
    c == ' ' || c == '\t'
}

/// Incremental line parser, so IO-backed loaders can feed lines one at a
/// time without buffering the file.
#[derive(Debug, Default)]
pub struct TableParser {
    header: Option<(usize, usize)>,
    seen_data: bool,
    table: Option<StaticEmbeddingTable>,
}

impl TableParser {
    pub fn new() -> Self {
        Self::default()
    }

    /// Feeds one line; `line_no` is 1-based and only used for error reports.
    pub fn push_line(&mut self, line_no: usize, line: &str) -> Result<(), EmbeddingError> {
        let line = line.trim_end_matches(['\n', '\r']);
        if line.trim_matches(is_separator).is_empty() || line.starts_with('#') {
            return Ok(());
        }
        let mut fields = line.split(is_separator).filter(|f| !f.is_empty());
        let word = fields.next().unwrap_or_default();
        let rest: Vec<&str> = fields.collect();

        if !self.seen_data && self.header.is_none() && rest.len() == 1 {
            if let (Ok(count), Ok(dim)) = (word.parse::<usize>(), rest[0].parse::<usize>()) {
                self.header = Some((count, dim));
                self.seen_data = true;
                return Ok(());
            }
        }
        self.seen_data = true;

        if rest.is_empty() {
            return Err(EmbeddingError::MalformedLine {
                line: line_no,
                reason: "word has no vector components".to_string(),
            });
        }
        let mut vector = Vec::with_capacity(rest.len());
        for component in &rest {
            let value: f32 = component.parse().map_err(|_| EmbeddingError::MalformedLine {
                line: line_no,
                reason: alloc::format!("non-numeric component {component:?}"),
            })?;
            vector.push(value);
        }

        let table = self.table.get_or_insert_with(|| StaticEmbeddingTable {
            dim: vector.len(),
            rows: BTreeMap::new(),
            data: Vec::new(),
            unknown: Vec::new(),
        });
        if vector.len() != table.dim {
            return Err(EmbeddingError::DimensionMismatch {
                line: line_no,
                expected: table.dim,
                found: vector.len(),
            });
        }
        if table.rows.contains_key(word) {
            return Err(EmbeddingError::DuplicateWord { line: line_no, word: word.to_string() });
        }
        table.push(word.to_string(), &vector);
        Ok(())
    }

    pub fn finish(self, unknown_token: Option<&str>) -> Result<StaticEmbeddingTable, EmbeddingError> {
        let mut table = self.table.ok_or(EmbeddingError::EmptyTable)?;
        if let Some((declared_count, declared_dim)) = self.header {
            if declared_count != table.len() || declared_dim != table.dim {
                return Err(EmbeddingError::HeaderMismatch {
                    declared_count,
                    declared_dim,
                    count: table.len(),
                    dim: table.dim,
                });
            }
        }
        table.unknown = match unknown_token.and_then(|tok| table.get(tok)) {
            Some(v) => v.to_vec(),
            None => vec![0.0; table.dim],
        };
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str, unk: Option<&str>) -> Result<StaticEmbeddingTable, EmbeddingError> {
        StaticEmbeddingTable::parse_lines(src.lines(), unk)
    }

    #[test]
    fn parses_plain_table() {
        let t = parse("cat 1.0 2.0\ndog 3.0 4.0", None).unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.len(), 2);
        assert_eq!(t.lookup("cat"), &[1.0, 2.0]);
        assert_eq!(t.lookup("dog"), &[3.0, 4.0]);
        assert_eq!(t.unknown_vector(), &[0.0, 0.0]);
    }

    #[test]
    fn short_line_is_dimension_mismatch() {
        assert_eq!(
            parse("cat 1.0 2.0\ndog 3.0", None),
            Err(EmbeddingError::DimensionMismatch { line: 2, expected: 2, found: 1 })
        );
    }

    #[test]
    fn unknown_token_sets_fallback_and_stays_entry() {
        let t = parse("*UNK* 0.5 0.5\ncat 1.0 2.0", Some("*UNK*")).unwrap();
        assert_eq!(t.unknown_vector(), &[0.5, 0.5]);
        assert_eq!(t.lookup("zyzzyva"), &[0.5, 0.5]);
        assert!(t.contains("*UNK*"));
    }

    #[test]
    fn missing_unknown_token_falls_back_to_zero() {
        let t = parse("cat 1.0 2.0", Some("<unk>")).unwrap();
        assert_eq!(t.lookup("zyzzyva"), &[0.0, 0.0]);
    }

    #[test]
    fn header_comments_and_tabs() {
        let t = parse("# glove subset\n2 3\ncat\t1 2 3\n\ndog  4\t5 6\n", None).unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.lookup("dog"), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn header_is_validated() {
        assert!(matches!(
            parse("3 2\ncat 1 2\ndog 3 4", None),
            Err(EmbeddingError::HeaderMismatch { declared_count: 3, count: 2, .. })
        ));
    }

    #[test]
    fn error_cases() {
        assert_eq!(parse("# only a comment\n\n", None), Err(EmbeddingError::EmptyTable));
        assert!(matches!(parse("cat 1.0 x", None), Err(EmbeddingError::MalformedLine { line: 1, .. })));
        assert!(matches!(parse("cat", None), Err(EmbeddingError::MalformedLine { line: 1, .. })));
        assert!(matches!(
            parse("cat 1\ncat 2", None),
            Err(EmbeddingError::DuplicateWord { line: 2, .. })
        ));
    }

    #[test]
    fn case_sensitive_words() {
        let t = parse("Cat 1\ncat 2", None).unwrap();
        assert_eq!(t.lookup("Cat"), &[1.0]);
        assert_eq!(t.lookup("cat"), &[2.0]);
        assert_eq!(t.lookup("CAT"), &[0.0]);
    }

    #[test]
    fn from_entries_validates() {
        assert!(StaticEmbeddingTable::from_entries(1, [("a", vec![1.0])], None).is_some());
        assert!(StaticEmbeddingTable::from_entries(2, [("a", vec![1.0])], None).is_none());
        assert!(StaticEmbeddingTable::from_entries(1, [("", vec![1.0])], None).is_none());
        assert!(StaticEmbeddingTable::from_entries(1, [("a b", vec![1.0])], None).is_none());
        assert!(StaticEmbeddingTable::from_entries(1, [("a", vec![1.0]), ("a", vec![2.0])], None).is_none());
    }
}
