//! Text cleaning, tokenization and named-entity / rare-word labelling.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::Document;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub enum Label {
    #[default]
    #[serde(rename = "PLAIN")]
    Plain,
    #[serde(rename = "NE")]
    NamedEntity,
    #[serde(rename = "RW")]
    RareWord,
}

impl Label {
    /// NE and RW words always live alone in their cluster.
    pub fn is_singleton(self) -> bool {
        matches!(self, Label::NamedEntity | Label::RareWord)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// Lowercased form used for the vocabulary, clustering and BM25.
    pub surface: String,
    /// Form as it appeared in the text; NE detection reads its casing.
    pub original: String,
    pub label: Label,
    /// Index among the tokens kept after stopword removal.
    pub position: usize,
    /// First word of a sentence in the unfiltered text.
    pub sentence_initial: bool,
    /// Label came from an external annotation and must not be recomputed.
    pub preset: bool,
}

/// Settings shared by document and query processing.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TextConfig {
    pub stopwords: BTreeSet<String>,
    pub gazetteer: BTreeSet<String>,
    /// Words with document frequency at or below this are rare.
    pub rw_threshold: u64,
}

impl TextConfig {
    pub fn with_rw_threshold(rw_threshold: u64) -> Self {
        Self {
            rw_threshold,
            ..Self::default()
        }
    }
}

static TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"</?[A-Za-z!][^<>]*>").unwrap());
static URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(?:https?://|ftp://|www\.)\S*").unwrap());
static ENTITY: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"&(?:[A-Za-z]+|#[0-9]+);").unwrap());
static HASHTAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"#+(\w)").unwrap());
static SPACE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\s+").unwrap());

/// Strips HTML tags, entities, URLs and hashtag markers, then collapses whitespace.
/// Idempotent.
pub fn preprocess(raw: &str) -> String {
    let mut current = raw.to_string();
    loop {
        let next = preprocess_once(&current);
        if next == current {
            return next;
        }
        current = next;
    }
}

fn preprocess_once(raw: &str) -> String {
    let s = TAG.replace_all(raw, " ");
    let s = ENTITY.replace_all(&s, " ");
    let s = URL.replace_all(&s, " ");
    let s = HASHTAG.replace_all(&s, "$1");
    SPACE.replace_all(&s, " ").trim().to_string()
}

fn is_sentence_end(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | '。' | '！' | '？')
}

/// Splits on non-alphanumeric characters, lowercases and drops stopwords.
pub fn tokenize(text: &str, stopwords: &BTreeSet<String>) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut at_sentence_start = true;
    let push = |word: &str, sentence_initial: bool, tokens: &mut Vec<Token>| {
        let surface = word.to_lowercase();
        if !stopwords.contains(&surface) {
            tokens.push(Token {
                surface,
                original: word.to_string(),
                label: Label::Plain,
                position: tokens.len(),
                sentence_initial,
                preset: false,
            });
        }
    };
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() {
            start.get_or_insert(i);
            continue;
        }
        if let Some(s) = start.take() {
            push(&text[s..i], at_sentence_start, &mut tokens);
            at_sentence_start = false;
        }
        if is_sentence_end(c) {
            at_sentence_start = true;
        }
    }
    if let Some(s) = start {
        push(&text[s..], at_sentence_start, &mut tokens);
    }
    tokens
}

/// Tokens of a document: the external annotation when present, else the
/// preprocessed and tokenized text. Labels are not yet assigned for the latter.
pub fn document_tokens(doc: &Document, config: &TextConfig) -> Vec<Token> {
    let Some(annotated) = &doc.tokens else {
        return tokenize(&preprocess(&doc.text), &config.stopwords);
    };
    let mut out = Vec::new();
    for at in annotated {
        for mut t in tokenize(&at.text, &config.stopwords) {
            t.position = out.len();
            t.label = at.label;
            t.preset = true;
            out.push(t);
        }
    }
    out
}

fn is_capitalized(word: &str) -> bool {
    word.chars().next().is_some_and(char::is_uppercase)
}

/// Heuristic NE test for one occurrence: gazetteer entry, or capitalized away from a sentence start.
fn looks_like_entity(token: &Token, gazetteer: Option<&BTreeSet<String>>) -> bool {
    gazetteer.is_some_and(|g| g.contains(&token.surface))
        || (is_capitalized(&token.original) && !token.sentence_initial)
}

/// Labels tokens NE, RW or PLAIN. Preset labels are kept.
///
/// A surface the vocabulary already marks NE stays NE wherever it occurs, so
/// lowercase mentions in a query do not soft-match.
pub fn annotate(
    mut tokens: Vec<Token>,
    gazetteer: Option<&BTreeSet<String>>,
    vocabulary: &Vocabulary,
    rw_threshold: u64,
) -> Vec<Token> {
    for t in tokens.iter_mut().filter(|t| !t.preset) {
        let entry = vocabulary.get(&t.surface);
        t.label = if looks_like_entity(t, gazetteer)
            || entry.is_some_and(|e| e.label == Label::NamedEntity)
        {
            Label::NamedEntity
        } else if entry.map_or(0, |e| e.df) <= rw_threshold {
            Label::RareWord
        } else {
            Label::Plain
        };
    }
    tokens
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabEntry {
    /// Corpus term frequency.
    pub tf: u64,
    /// Document frequency.
    pub df: u64,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Vocabulary {
    entries: BTreeMap<String, VocabEntry>,
    doc_count: u64,
}

impl Vocabulary {
    /// Vocabulary from pre-computed entries, e.g. an externally annotated corpus.
    pub fn from_entries(entries: BTreeMap<String, VocabEntry>, doc_count: u64) -> Result<Self> {
        for (surface, e) in &entries {
            if surface.is_empty() || e.tf < e.df || e.df < 1 || e.df > doc_count {
                return Err(Error::Validation(format!(
                    "inconsistent vocabulary entry {surface:?}: tf {} df {} over {doc_count} documents",
                    e.tf, e.df
                )));
            }
        }
        Ok(Self { entries, doc_count })
    }

    pub fn get(&self, surface: &str) -> Option<&VocabEntry> {
        self.entries.get(surface)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn doc_count(&self) -> u64 {
        self.doc_count
    }

    /// Entries in lexicographic surface order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &VocabEntry)> {
        self.entries.iter().map(|(s, e)| (s.as_str(), e))
    }

    /// Counts additional documents. Existing entries keep their label; new
    /// surfaces are labelled from the evidence in `docs`. Returns the new
    /// surfaces in lexicographic order.
    pub fn extend(&mut self, docs: &[Document], config: &TextConfig) -> Vec<String> {
        let mut evidence: BTreeMap<String, Evidence> = BTreeMap::new();
        for doc in docs {
            let tokens = document_tokens(doc, config);
            for (surface, ev) in document_evidence(&tokens, config) {
                evidence.entry(surface).or_default().merge(&ev);
            }
        }
        self.doc_count += docs.len() as u64;
        let mut added = Vec::new();
        for (surface, ev) in evidence {
            match self.entries.get_mut(&surface) {
                Some(entry) => {
                    entry.tf += ev.tf;
                    entry.df += ev.df;
                }
                None => {
                    let entry = VocabEntry {
                        tf: ev.tf,
                        df: ev.df,
                        label: ev.label(config.rw_threshold),
                    };
                    self.entries.insert(surface.clone(), entry);
                    added.push(surface);
                }
            }
        }
        added
    }
}

/// Per-surface evidence gathered while counting; merges associatively.
#[derive(Debug, Clone, Copy, Default)]
struct Evidence {
    tf: u64,
    df: u64,
    entity_votes: u64,
    plain_votes: u64,
    preset_entity: bool,
    preset_rare: bool,
    gazetteer: bool,
}

impl Evidence {
    fn merge(&mut self, other: &Evidence) {
        self.tf += other.tf;
        self.df += other.df;
        self.entity_votes += other.entity_votes;
        self.plain_votes += other.plain_votes;
        self.preset_entity |= other.preset_entity;
        self.preset_rare |= other.preset_rare;
        self.gazetteer |= other.gazetteer;
    }

    fn label(&self, rw_threshold: u64) -> Label {
        if self.gazetteer || self.preset_entity || self.entity_votes > self.plain_votes {
            Label::NamedEntity
        } else if self.preset_rare || self.df <= rw_threshold {
            Label::RareWord
        } else {
            Label::Plain
        }
    }
}

fn document_evidence(tokens: &[Token], config: &TextConfig) -> BTreeMap<String, Evidence> {
    let mut out: BTreeMap<String, Evidence> = BTreeMap::new();
    for t in tokens {
        let ev = out.entry(t.surface.clone()).or_default();
        ev.tf += 1;
        ev.df = 1;
        if t.preset {
            match t.label {
                Label::NamedEntity => ev.preset_entity = true,
                Label::RareWord => ev.preset_rare = true,
                Label::Plain => ev.plain_votes += 1,
            }
        } else if config.gazetteer.contains(&t.surface) {
            ev.gazetteer = true;
        } else if !t.sentence_initial {
            if is_capitalized(&t.original) {
                ev.entity_votes += 1;
            } else {
                ev.plain_votes += 1;
            }
        }
    }
    out
}

/// Builds the corpus vocabulary with exact term and document frequencies.
///
/// A surface is NE when it is in the gazetteer, externally labelled NE, or
/// capitalized in most of its non-sentence-initial occurrences. Otherwise it
/// is RW when its document frequency is at most `rw_threshold`.
pub fn build_vocabulary(corpus: &[Document], config: &TextConfig) -> Vocabulary {
    let mut vocab = Vocabulary::default();
    vocab.extend(corpus, config);
    vocab
}

/// Tokenizes and labels query text with the same pipeline used for documents.
pub fn process_query(text: &str, config: &TextConfig, vocabulary: &Vocabulary) -> Vec<Token> {
    let tokens = tokenize(&preprocess(text), &config.stopwords);
    annotate(tokens, Some(&config.gazetteer), vocabulary, config.rw_threshold)
}
