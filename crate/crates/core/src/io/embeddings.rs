//! Text word-vector files: a `count dim` header followed by one
//! `word v1 ... v_dim` row per word.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Dense word vectors of a fixed dimension. Every stored vector is finite and non-zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    vectors: Vec<Vec<f64>>,
    lookup: HashMap<String, usize>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            ..Self::default()
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.lookup.get(word).map(|&i| self.vectors[i].as_slice())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.lookup.contains_key(word)
    }

    /// Words in insertion (file) order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.words
            .iter()
            .zip(&self.vectors)
            .map(|(w, v)| (w.as_str(), v.as_slice()))
    }

    /// Adds or replaces a vector. Rejects wrong dimensions, non-finite components and zero vectors.
    pub fn insert(&mut self, word: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        let word = word.into();
        if vector.len() != self.dim {
            return Err(Error::Validation(format!(
                "vector for {word:?} has {} components, table dim is {}",
                vector.len(),
                self.dim
            )));
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation(format!(
                "vector for {word:?} has non-finite components"
            )));
        }
        if vector.iter().all(|&x| x == 0.0) {
            return Err(Error::Validation(format!("zero vector for {word:?}")));
        }
        match self.lookup.get(&word) {
            Some(&i) => self.vectors[i] = vector,
            None => {
                self.lookup.insert(word.clone(), self.words.len());
                self.words.push(word);
                self.vectors.push(vector);
            }
        }
        Ok(())
    }

    /// Copy restricted to `keep`, preserving order.
    pub fn restricted_to<'a>(&self, keep: impl IntoIterator<Item = &'a str>) -> Self {
        let keep: HashSet<&str> = keep.into_iter().collect();
        let mut out = Self::new(self.dim);
        for (w, v) in self.iter() {
            if keep.contains(w) {
                out.lookup.insert(w.to_string(), out.words.len());
                out.words.push(w.to_string());
                out.vectors.push(v.to_vec());
            }
        }
        out
    }
}

/// Loads a text-format embedding file, optionally keeping only words in `vocab_filter`.
///
/// Every row is validated even when filtered out, so a malformed file fails
/// regardless of the filter.
pub fn load_embeddings(path: &Path, vocab_filter: Option<&HashSet<String>>) -> Result<EmbeddingTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let (count, dim) = loop {
        let Some((i, line)) = lines.next() else {
            return Err(Error::parse(path, 1, "missing \"count dim\" header"));
        };
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        break parse_header(path, i + 1, &line)?;
    };

    let mut table = EmbeddingTable::new(dim);
    let mut rows = 0usize;
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let word = parts.next().unwrap_or_default();
        let mut vector = Vec::with_capacity(dim);
        for raw in parts {
            let x: f64 = raw
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("invalid component {raw:?}")))?;
            if !x.is_finite() {
                return Err(Error::parse(path, lineno, format!("non-finite component {raw:?}")));
            }
            vector.push(x);
        }
        if vector.len() != dim {
            return Err(Error::Dimension {
                path: path.to_path_buf(),
                line: lineno,
                expected: dim,
                found: vector.len(),
            });
        }
        if vector.iter().all(|&x| x == 0.0) {
            return Err(Error::ZeroVector {
                path: path.to_path_buf(),
                line: lineno,
                word: word.to_string(),
            });
        }
        rows += 1;
        if rows > count {
            return Err(Error::parse(
                path,
                lineno,
                format!("more rows than the {count} declared in the header"),
            ));
        }
        if vocab_filter.is_some_and(|f| !f.contains(word)) {
            continue;
        }
        if table.contains(word) {
            log::warn!("{}:{lineno}: duplicate word {word:?}, keeping first", path.display());
            continue;
        }
        table.insert(word, vector)?;
    }
    if rows != count {
        return Err(Error::parse(
            path,
            rows + 1,
            format!("header declares {count} rows, found {rows}"),
        ));
    }
    Ok(table)
}

fn parse_header(path: &Path, lineno: usize, line: &str) -> Result<(usize, usize)> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let bad = || Error::parse(path, lineno, format!("malformed header {line:?}, expected \"count dim\""));
    if fields.len() != 2 {
        return Err(bad());
    }
    let count = fields[0].parse().map_err(|_| bad())?;
    let dim: usize = fields[1].parse().map_err(|_| bad())?;
    if dim == 0 && count > 0 {
        return Err(bad());
    }
    Ok((count, dim))
}

/// Writes `table` in the same text format. Components use the shortest
/// representation that parses back to the identical `f64`.
pub fn write_embeddings(table: &EmbeddingTable, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(out, "{} {}", table.len(), table.dim()).map_err(io)?;
    for (word, vector) in table.iter() {
        write!(out, "{word}").map_err(io)?;
        for x in vector {
            write!(out, " {x:?}").map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    out.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file_with(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_all_rows() {
        let f = file_with("2 2\na 1 0\nb 0 1\n");
        let table = load_embeddings(f.path(), None).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table.dim(), 2);
        assert_eq!(table.get("b"), Some(&[0.0, 1.0][..]));
    }

    #[test]
    fn filter_keeps_only_requested_words() {
        let f = file_with("2 2\na 1 0\nb 0 1");
        let filter: HashSet<String> = ["a".to_string()].into();
        let table = load_embeddings(f.path(), Some(&filter)).unwrap();
        assert_eq!(table.len(), 1);
        assert!(table.contains("a"));
    }

    #[test]
    fn short_row_is_a_dimension_error_at_its_line() {
        let f = file_with("1 3\na 1 0");
        match load_embeddings(f.path(), None) {
            Err(Error::Dimension { line, expected, found, .. }) => {
                assert_eq!((line, expected, found), (2, 3, 2));
            }
            other => panic!("expected dimension error, got {other:?}"),
        }
    }

    #[test]
    fn zero_vector_names_the_word() {
        let f = file_with("2 2\na 1 0\nnil 0 0\n");
        match load_embeddings(f.path(), None) {
            Err(Error::ZeroVector { word, line, .. }) => {
                assert_eq!(word, "nil");
                assert_eq!(line, 3);
            }
            other => panic!("expected zero-vector error, got {other:?}"),
        }
    }

    #[test]
    fn header_and_row_errors() {
        let f = file_with("two 2\na 1 0\n");
        assert!(matches!(load_embeddings(f.path(), None), Err(Error::Parse { line: 1, .. })));
        let f = file_with("1 2\na 1 x\n");
        assert!(matches!(load_embeddings(f.path(), None), Err(Error::Parse { line: 2, .. })));
        let f = file_with("3 2\na 1 0\n");
        assert!(matches!(load_embeddings(f.path(), None), Err(Error::Parse { .. })));
        let f = file_with("1 2\na 1 0\nb 0 1\n");
        assert!(matches!(load_embeddings(f.path(), None), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_embeddings(Path::new("/nonexistent/vectors.txt"), None).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("/nonexistent/vectors.txt"));
    }

    #[test]
    fn write_then_load_is_exact() {
        let mut table = EmbeddingTable::new(3);
        table.insert("x", vec![0.1, -1.0 / 3.0, 1e-300]).unwrap();
        table.insert("y", vec![std::f64::consts::PI, 2.0, -0.0]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.txt");
        write_embeddings(&table, &path).unwrap();
        assert_eq!(load_embeddings(&path, None).unwrap(), table);
    }
}
