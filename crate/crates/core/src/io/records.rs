//! Corpus, query, qrels, lexicon and word-list readers.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::Label;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    /// Pre-annotated tokens. When present they replace tokenization of `text`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<Vec<AnnotatedToken>>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            tokens: None,
        }
    }
}

/// One externally labelled token of a pre-annotated document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedToken {
    pub text: String,
    #[serde(default)]
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub id: String,
    pub text: String,
}

impl Query {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
        }
    }
}

/// Relevance judgments keyed by query id, then document id.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeMap<String, u32>>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a judgment, keeping the maximum grade seen for the pair.
    pub fn insert(&mut self, query: impl Into<String>, doc: impl Into<String>, grade: u32) {
        let slot = self
            .judgments
            .entry(query.into())
            .or_default()
            .entry(doc.into())
            .or_insert(grade);
        *slot = (*slot).max(grade);
    }

    pub fn grade(&self, query: &str, doc: &str) -> Option<u32> {
        self.judgments.get(query)?.get(doc).copied()
    }

    pub fn is_relevant(&self, query: &str, doc: &str) -> bool {
        self.grade(query, doc).is_some_and(|g| g >= 1)
    }

    pub fn relevant_count(&self, query: &str) -> usize {
        self.judgments
            .get(query)
            .map_or(0, |docs| docs.values().filter(|&&g| g >= 1).count())
    }

    pub fn relevant_docs(&self, query: &str) -> impl Iterator<Item = &str> {
        self.judgments
            .get(query)
            .into_iter()
            .flat_map(|docs| docs.iter().filter(|(_, &g)| g >= 1).map(|(d, _)| d.as_str()))
    }

    pub fn contains_query(&self, query: &str) -> bool {
        self.judgments.contains_key(query)
    }

    pub fn queries(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }
}

/// Word to synonym list. No word maps to itself and no list is empty.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, Vec<String>>", into = "BTreeMap<String, Vec<String>>")]
pub struct SynonymLexicon {
    pairs: BTreeMap<String, Vec<String>>,
}

impl SynonymLexicon {
    pub fn new(pairs: BTreeMap<String, Vec<String>>) -> Result<Self> {
        let mut clean = BTreeMap::new();
        for (word, synonyms) in pairs {
            let word = word.to_lowercase();
            if synonyms.is_empty() {
                return Err(Error::Validation(format!("lexicon entry {word:?} has no synonyms")));
            }
            if synonyms.iter().any(|s| s.to_lowercase() == word) {
                return Err(Error::Validation(format!("lexicon entry {word:?} lists itself")));
            }
            clean.insert(word, synonyms);
        }
        Ok(Self { pairs: clean })
    }

    pub fn synonyms(&self, word: &str) -> Option<&[String]> {
        self.pairs.get(word).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.pairs.iter().map(|(w, s)| (w.as_str(), s.as_slice()))
    }
}

impl TryFrom<BTreeMap<String, Vec<String>>> for SynonymLexicon {
    type Error = Error;

    fn try_from(pairs: BTreeMap<String, Vec<String>>) -> Result<Self> {
        Self::new(pairs)
    }
}

impl From<SynonymLexicon> for BTreeMap<String, Vec<String>> {
    fn from(lex: SynonymLexicon) -> Self {
        lex.pairs
    }
}

fn open_lines(path: &Path) -> Result<impl Iterator<Item = (usize, Result<String>)> + '_> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(BufReader::new(file)
        .lines()
        .enumerate()
        .map(move |(i, l)| (i + 1, l.map_err(|e| Error::io(path, e)))))
}

/// Reads a JSON Lines corpus, one `{"id", "text"}` object per line.
pub fn read_corpus(path: &Path) -> Result<Vec<Document>> {
    let mut seen = HashSet::new();
    let mut docs = Vec::new();
    for (lineno, line) in open_lines(path)? {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document =
            serde_json::from_str(&line).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        if doc.id.is_empty() {
            return Err(Error::parse(path, lineno, "empty document id"));
        }
        if !seen.insert(doc.id.clone()) {
            return Err(Error::Duplicate {
                kind: "document",
                id: doc.id,
            });
        }
        docs.push(doc);
    }
    Ok(docs)
}

/// Reads a tab-separated query file, `id<TAB>text` per line.
pub fn read_queries(path: &Path) -> Result<Vec<Query>> {
    let mut seen = HashSet::new();
    let mut queries = Vec::new();
    for (lineno, line) in open_lines(path)? {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (id, text) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, lineno, "expected \"id<TAB>text\""))?;
        if id.is_empty() {
            return Err(Error::parse(path, lineno, "empty query id"));
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::Duplicate {
                kind: "query",
                id: id.to_string(),
            });
        }
        queries.push(Query::new(id, text));
    }
    Ok(queries)
}

pub fn write_queries(queries: &[Query], path: &Path) -> Result<()> {
    let mut out = String::new();
    for q in queries {
        if q.id.contains(['\t', '\n']) || q.text.contains(['\t', '\n']) {
            return Err(Error::Validation(format!(
                "query {:?} contains a tab or newline",
                q.id
            )));
        }
        out.push_str(&q.id);
        out.push('\t');
        out.push_str(&q.text);
        out.push('\n');
    }
    super::write_atomic(path, out.as_bytes())
}

/// Reads TREC qrels, `qid 0 docid grade` per line. Repeated pairs keep the maximum grade.
pub fn read_qrels(path: &Path) -> Result<Qrels> {
    let mut qrels = Qrels::new();
    for (lineno, line) in open_lines(path)? {
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 4 {
            return Err(Error::parse(path, lineno, "expected \"qid 0 docid grade\""));
        }
        let grade: i64 = fields[3]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("invalid grade {:?}", fields[3])))?;
        let grade = u32::try_from(grade)
            .map_err(|_| Error::parse(path, lineno, format!("grade {grade} out of range")))?;
        qrels.insert(fields[0], fields[2], grade);
    }
    Ok(qrels)
}

/// Reads a JSON object mapping each word to its synonyms.
pub fn read_lexicon(path: &Path) -> Result<SynonymLexicon> {
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let pairs: BTreeMap<String, Vec<String>> = serde_json::from_str(&raw).map_err(|e| {
        Error::parse(path, e.line(), e.to_string())
    })?;
    SynonymLexicon::new(pairs)
}

/// One entry per non-empty line, lowercased and trimmed. Used for stopwords and gazetteers.
pub fn read_word_list(path: &Path) -> Result<BTreeSet<String>> {
    let mut words = BTreeSet::new();
    for (_, line) in open_lines(path)? {
        let line = line?;
        let w = line.trim();
        if !w.is_empty() {
            words.insert(w.to_lowercase());
        }
    }
    Ok(words)
}

/// Reads synonym pairs, `word1<TAB>word2` per line.
pub fn read_synonym_pairs(path: &Path) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, line) in open_lines(path)? {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, lineno, "expected \"word1<TAB>word2\""))?;
        let (a, b) = (a.trim(), b.trim());
        if a.is_empty() || b.is_empty() {
            return Err(Error::parse(path, lineno, "empty word in pair"));
        }
        pairs.push((a.to_string(), b.to_string()));
    }
    Ok(pairs)
}
