//! Document vectors in cluster space, corpus statistics and postings.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::cluster::{self, build_clusters, Cluster, ClusterConfig, ClusterSet, WordEntry};
use crate::error::{Error, Result};
use crate::io::{Document, EmbeddingTable};
use crate::text::{self, build_vocabulary, Label, TextConfig, Token, Vocabulary};

/// Surface to term frequency for one document.
pub type TermCounts = BTreeMap<String, u64>;

pub fn term_counts(tokens: &[Token]) -> TermCounts {
    let mut counts = TermCounts::new();
    for t in tokens {
        *counts.entry(t.surface.clone()).or_default() += 1;
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn validate(&self) -> Result<()> {
        if !(self.k1.is_finite() && self.k1 >= 0.0) {
            return Err(Error::Validation(format!("k1 must be finite and >= 0, got {}", self.k1)));
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(Error::Validation(format!("b must lie in [0, 1], got {}", self.b)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonSource {
    /// Mean distance over a synonym-pair file.
    Estimated,
    /// Supplied explicitly.
    Override,
    /// No pairs supplied; the built-in fallback.
    Default,
}

/// Every parameter that affects scores. Persisted in the index manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexConfig {
    pub text: TextConfig,
    pub epsilon: f64,
    pub epsilon_source: EpsilonSource,
    pub gamma: f64,
    pub bm25: Bm25Params,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self {
            text: TextConfig::with_rw_threshold(1),
            epsilon: cluster::DEFAULT_EPSILON,
            epsilon_source: EpsilonSource::Default,
            gamma: 1.0,
            bm25: Bm25Params::default(),
        }
    }
}

impl IndexConfig {
    pub fn validate(&self) -> Result<()> {
        ClusterConfig::new(self.epsilon)?;
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::Validation(format!("gamma must be > 0, got {}", self.gamma)));
        }
        self.bm25.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DocVector {
    /// Cluster id to weight. Every stored weight is > 0.
    pub weights: BTreeMap<usize, f64>,
    pub norm: f64,
}

impl DocVector {
    pub fn from_weights(weights: BTreeMap<usize, f64>) -> Self {
        let norm = weights.values().map(|w| w * w).sum::<f64>().sqrt();
        Self { weights, norm }
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocRecord {
    pub id: String,
    pub len: u64,
    pub terms: TermCounts,
    pub vector: DocVector,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CorpusStats {
    pub doc_count: u64,
    /// Documents containing at least one word of each cluster, indexed by cluster id.
    pub cluster_df: Vec<u64>,
    pub avg_doc_len: f64,
    pub term_df: BTreeMap<String, u64>,
}

impl CorpusStats {
    pub fn cluster_df(&self, cluster: usize) -> u64 {
        self.cluster_df.get(cluster).copied().unwrap_or(0)
    }

    pub fn term_df(&self, term: &str) -> u64 {
        self.term_df.get(term).copied().unwrap_or(0)
    }
}

/// `F`: summed term frequency of the cluster's words in the document.
pub fn cluster_frequency(terms: &TermCounts, cluster: &Cluster) -> u64 {
    cluster.words.iter().filter_map(|w| terms.get(w)).sum()
}

/// Fraction of the cluster's words that occur in the document.
pub fn beta_factor(terms: &TermCounts, cluster: &Cluster) -> f64 {
    if cluster.words.is_empty() {
        return 0.0;
    }
    let present = cluster.words.iter().filter(|w| terms.contains_key(*w)).count();
    present as f64 / cluster.words.len() as f64
}

/// `beta * ln(1 + F) * max(0, ln(N / (N_i + 1)))`.
///
/// The IDF factor is clamped at zero so document vectors stay non-negative.
pub fn alpha(beta: f64, frequency: u64, doc_count: u64, cluster_df: u64) -> f64 {
    if frequency == 0 || doc_count == 0 {
        return 0.0;
    }
    let idf = (doc_count as f64 / (cluster_df as f64 + 1.0)).ln().max(0.0);
    beta * (frequency as f64).ln_1p() * idf
}

pub fn cluster_weight(terms: &TermCounts, cluster: &Cluster, stats: &CorpusStats) -> f64 {
    alpha(
        beta_factor(terms, cluster),
        cluster_frequency(terms, cluster),
        stats.doc_count,
        stats.cluster_df(cluster.id),
    )
}

/// Sparse cluster-space vector holding a weight for every cluster the document touches.
pub fn build_doc_vector(terms: &TermCounts, clusters: &ClusterSet, stats: &CorpusStats) -> DocVector {
    // cluster id -> (F, distinct words present)
    let mut touched: BTreeMap<usize, (u64, usize)> = BTreeMap::new();
    for (surface, &tf) in terms {
        if let Some(id) = clusters.cluster_of(surface) {
            let slot = touched.entry(id).or_default();
            slot.0 += tf;
            slot.1 += 1;
        }
    }
    let weights = touched
        .into_iter()
        .filter_map(|(id, (freq, present))| {
            let size = clusters.get(id)?.words.len();
            let w = alpha(present as f64 / size as f64, freq, stats.doc_count, stats.cluster_df(id));
            (w > 0.0).then_some((id, w))
        })
        .collect();
    DocVector::from_weights(weights)
}

/// Okapi BM25 IDF, `ln(1 + (N - df + 0.5) / (df + 0.5))`; never negative.
pub fn bm25_idf(doc_count: u64, df: u64) -> f64 {
    let (n, df) = (doc_count as f64, df as f64);
    (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
}

/// One term's BM25 contribution.
pub fn bm25_term(idf: f64, tf: u64, doc_len: u64, avg_doc_len: f64, params: Bm25Params) -> f64 {
    if tf == 0 {
        return 0.0;
    }
    let tf = tf as f64;
    let len_ratio = if avg_doc_len > 0.0 {
        doc_len as f64 / avg_doc_len
    } else {
        1.0
    };
    idf * tf * (params.k1 + 1.0) / (tf + params.k1 * (1.0 - params.b + params.b * len_ratio))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Index {
    pub(crate) config: IndexConfig,
    pub(crate) vocabulary: Vocabulary,
    pub(crate) clusters: ClusterSet,
    pub(crate) vectors: EmbeddingTable,
    pub(crate) docs: Vec<DocRecord>,
    pub(crate) stats: CorpusStats,
    derived: Derived,
}

/// Lookup structures rebuilt from the persisted parts.
#[derive(Debug, Clone, PartialEq, Default)]
struct Derived {
    doc_lookup: HashMap<String, usize>,
    cluster_postings: Vec<Vec<(usize, f64)>>,
    term_postings: HashMap<String, Vec<(usize, u64)>>,
    avg_vectors: Vec<Option<Vec<f64>>>,
}

impl Index {
    pub(crate) fn from_parts(
        config: IndexConfig,
        vocabulary: Vocabulary,
        clusters: ClusterSet,
        vectors: EmbeddingTable,
        docs: Vec<DocRecord>,
        stats: CorpusStats,
    ) -> Result<Self> {
        let mut index = Self {
            config,
            vocabulary,
            clusters,
            vectors,
            docs,
            stats,
            derived: Derived::default(),
        };
        index.rebuild_derived()?;
        Ok(index)
    }

    pub fn config(&self) -> &IndexConfig {
        &self.config
    }

    pub fn text_config(&self) -> &TextConfig {
        &self.config.text
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn clusters(&self) -> &ClusterSet {
        &self.clusters
    }

    pub fn stats(&self) -> &CorpusStats {
        &self.stats
    }

    pub fn docs(&self) -> &[DocRecord] {
        &self.docs
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    /// Stored embedding of a vocabulary word.
    pub fn word_vector(&self, surface: &str) -> Option<&[f64]> {
        self.vectors.get(surface)
    }

    pub fn word_vectors(&self) -> &EmbeddingTable {
        &self.vectors
    }

    pub fn doc_position(&self, doc_id: &str) -> Option<usize> {
        self.derived.doc_lookup.get(doc_id).copied()
    }

    /// `(doc position, alpha)` pairs for a cluster.
    pub fn cluster_postings(&self, cluster: usize) -> &[(usize, f64)] {
        self.derived.cluster_postings.get(cluster).map_or(&[], Vec::as_slice)
    }

    /// `(doc position, tf)` pairs for a term.
    pub fn term_postings(&self, term: &str) -> &[(usize, u64)] {
        self.derived.term_postings.get(term).map_or(&[], Vec::as_slice)
    }

    /// TF-IDF weighted mean embedding of a document, `None` when no token has positive weight.
    pub fn avg_vector(&self, doc: usize) -> Option<&[f64]> {
        self.derived.avg_vectors.get(doc)?.as_deref()
    }

    /// Labels query text the same way documents were labelled.
    pub fn process_query(&self, text: &str) -> Vec<Token> {
        text::process_query(text, &self.config.text, &self.vocabulary)
    }

    /// BM25 score of one document for the given query terms (summed per occurrence).
    pub fn bm25_score<S: AsRef<str>>(&self, query_terms: &[S], doc_id: &str) -> Result<f64> {
        let pos = self
            .doc_position(doc_id)
            .ok_or_else(|| Error::Lookup(format!("unknown document {doc_id:?}")))?;
        let doc = &self.docs[pos];
        Ok(query_terms
            .iter()
            .map(|t| {
                let t = t.as_ref();
                let tf = doc.terms.get(t).copied().unwrap_or(0);
                let idf = bm25_idf(self.stats.doc_count, self.stats.term_df(t));
                bm25_term(idf, tf, doc.len, self.stats.avg_doc_len, self.config.bm25)
            })
            .sum())
    }

    /// Adds documents without moving existing centroids. Unseen words are
    /// clustered with the single-pass rule; `embeddings` supplies their
    /// vectors (words absent from it become singletons). All weights and
    /// statistics are then recomputed for the enlarged corpus.
    pub fn add_documents(&mut self, docs: &[Document], embeddings: Option<&EmbeddingTable>) -> Result<()> {
        let mut ids: HashSet<&str> = self.docs.iter().map(|d| d.id.as_str()).collect();
        for d in docs {
            if d.id.is_empty() {
                return Err(Error::Validation("empty document id".into()));
            }
            if !ids.insert(&d.id) {
                return Err(Error::Duplicate {
                    kind: "document",
                    id: d.id.clone(),
                });
            }
        }
        let added = self.vocabulary.extend(docs, &self.config.text);
        let mut order: Vec<(&str, u64)> = added
            .iter()
            .map(|w| (w.as_str(), self.vocabulary.get(w).map_or(0, |e| e.tf)))
            .collect();
        order.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        for (surface, _) in order {
            let label = self.vocabulary.get(surface).map_or(Label::Plain, |e| e.label);
            let vector = embeddings.and_then(|t| t.get(surface)).filter(|v| v.len() == self.vectors.dim());
            if let Some(v) = vector {
                self.vectors.insert(surface, v.to_vec())?;
            }
            self.clusters.insert_word(
                WordEntry {
                    surface,
                    label,
                    vector,
                },
                self.config.epsilon,
            )?;
        }
        for d in docs {
            let terms = term_counts(&text::document_tokens(d, &self.config.text));
            self.docs.push(DocRecord {
                id: d.id.clone(),
                len: terms.values().sum(),
                terms,
                vector: DocVector::default(),
            });
        }
        self.recompute_weights();
        self.rebuild_derived()
    }

    fn recompute_weights(&mut self) {
        self.stats = compute_stats(&self.docs, &self.clusters);
        for d in &mut self.docs {
            d.vector = build_doc_vector(&d.terms, &self.clusters, &self.stats);
        }
    }

    fn rebuild_derived(&mut self) -> Result<()> {
        let mut derived = Derived {
            cluster_postings: vec![Vec::new(); self.clusters.len()],
            ..Derived::default()
        };
        for (pos, d) in self.docs.iter().enumerate() {
            if derived.doc_lookup.insert(d.id.clone(), pos).is_some() {
                return Err(Error::Duplicate {
                    kind: "document",
                    id: d.id.clone(),
                });
            }
            for (&c, &w) in &d.vector.weights {
                let postings = derived
                    .cluster_postings
                    .get_mut(c)
                    .ok_or_else(|| Error::Corrupt(format!("document {:?} refers to cluster {c}", d.id)))?;
                postings.push((pos, w));
            }
            for (t, &tf) in &d.terms {
                derived.term_postings.entry(t.clone()).or_default().push((pos, tf));
            }
            let vector = avg_vector(&d.terms, |w| self.vectors.get(w), &self.stats, self.vectors.dim());
            derived.avg_vectors.push(vector);
        }
        self.derived = derived;
        Ok(())
    }
}

/// TF-IDF weighted mean of the word vectors of `terms`. The weight of a word
/// is `tf * max(0, ln(N / (1 + df)))`. Returns `None` when the total weight is zero.
pub fn avg_vector<'a>(
    terms: &TermCounts,
    lookup: impl Fn(&str) -> Option<&'a [f64]>,
    stats: &CorpusStats,
    dim: usize,
) -> Option<Vec<f64>> {
    let mut sum = vec![0.0; dim];
    let mut total = 0.0;
    for (w, &tf) in terms {
        let Some(v) = lookup(w) else { continue };
        let idf = (stats.doc_count as f64 / (1.0 + stats.term_df(w) as f64)).ln().max(0.0);
        let weight = tf as f64 * idf;
        if weight <= 0.0 || v.len() != dim {
            continue;
        }
        for (s, x) in sum.iter_mut().zip(v) {
            *s += weight * x;
        }
        total += weight;
    }
    if total <= 0.0 {
        return None;
    }
    sum.iter_mut().for_each(|s| *s /= total);
    sum.iter().any(|&x| x != 0.0).then_some(sum)
}

fn compute_stats(docs: &[DocRecord], clusters: &ClusterSet) -> CorpusStats {
    let mut cluster_df = vec![0u64; clusters.len()];
    let mut term_df: BTreeMap<String, u64> = BTreeMap::new();
    let mut total_len = 0u64;
    for d in docs {
        total_len += d.len;
        let mut touched = HashSet::new();
        for t in d.terms.keys() {
            *term_df.entry(t.clone()).or_default() += 1;
            if let Some(c) = clusters.cluster_of(t) {
                touched.insert(c);
            }
        }
        for c in touched {
            cluster_df[c] += 1;
        }
    }
    CorpusStats {
        doc_count: docs.len() as u64,
        cluster_df,
        avg_doc_len: if docs.is_empty() {
            0.0
        } else {
            total_len as f64 / docs.len() as f64
        },
        term_df,
    }
}

/// Runs the full pipeline: vocabulary, clustering, document vectors, statistics and postings.
pub fn build_index(corpus: &[Document], embeddings: &EmbeddingTable, config: &IndexConfig) -> Result<Index> {
    config.validate()?;
    let mut ids = HashSet::new();
    for d in corpus {
        if d.id.is_empty() {
            return Err(Error::Validation("empty document id".into()));
        }
        if !ids.insert(d.id.as_str()) {
            return Err(Error::Duplicate {
                kind: "document",
                id: d.id.clone(),
            });
        }
    }
    let vocabulary = build_vocabulary(corpus, &config.text);
    let clusters = build_clusters(&vocabulary, embeddings, &ClusterConfig::new(config.epsilon)?)?;
    let vectors = embeddings.restricted_to(vocabulary.iter().map(|(w, _)| w));
    let docs = corpus
        .iter()
        .map(|d| {
            let terms = term_counts(&text::document_tokens(d, &config.text));
            DocRecord {
                id: d.id.clone(),
                len: terms.values().sum(),
                terms,
                vector: DocVector::default(),
            }
        })
        .collect();
    let mut index = Index {
        config: config.clone(),
        vocabulary,
        clusters,
        vectors,
        docs,
        stats: CorpusStats::default(),
        derived: Derived::default(),
    };
    index.recompute_weights();
    index.rebuild_derived()?;
    Ok(index)
}
