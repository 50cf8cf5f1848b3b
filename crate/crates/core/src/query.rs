//! Query representation, the three retrieval systems and their fusion.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cluster::{cosine, cosine_distance, Cluster};
use crate::error::{Error, Result};
use crate::index::{self, bm25_idf, bm25_term, DocVector, Index};
use crate::io::{EmbeddingTable, Query, RunEntry};
use crate::text::{Label, Token};

pub const DEFAULT_K: usize = 50;
pub const DEFAULT_FUSION_DEPTH: usize = 100;

/// Tolerance for comparing requested parameters against the index manifest.
const PARAM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum System {
    Semantic,
    Bm25,
    Combined,
    AvgBaseline,
}

impl System {
    pub const ALL: [System; 4] = [System::Semantic, System::Bm25, System::Combined, System::AvgBaseline];

    pub fn tag(self) -> &'static str {
        match self {
            System::Semantic => "semantic",
            System::Bm25 => "bm25",
            System::Combined => "combined",
            System::AvgBaseline => "avg-baseline",
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        System::ALL
            .into_iter()
            .find(|sys| sys.tag() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown system {s:?}, expected one of semantic, bm25, combined, avg-baseline"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryConfig {
    pub gamma: f64,
    pub epsilon: f64,
    /// Result depth.
    pub k: usize,
    /// Depth of each list entering fusion.
    pub fusion_depth: usize,
}

impl QueryConfig {
    /// Parameters recorded in the index, with default depths.
    pub fn for_index(index: &Index) -> Self {
        Self {
            gamma: index.config().gamma,
            epsilon: index.config().epsilon,
            k: DEFAULT_K,
            fusion_depth: DEFAULT_FUSION_DEPTH,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::Config(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.k == 0 || self.fusion_depth == 0 {
            return Err(Error::Config("k and fusion depth must be at least 1".into()));
        }
        Ok(())
    }

    /// Rejects an epsilon or gamma that differs from the index build.
    pub fn check_against(&self, index: &Index) -> Result<()> {
        self.validate()?;
        let built = index.config();
        for (name, asked, stored) in [("epsilon", self.epsilon, built.epsilon), ("gamma", self.gamma, built.gamma)] {
            if (asked - stored).abs() > PARAM_TOLERANCE {
                return Err(Error::Config(format!(
                    "{name} {asked} differs from the index manifest value {stored}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDoc {
    pub doc_id: String,
    pub score: f64,
    pub rank: usize,
}

/// Ranked results: scores non-increasing, ties by ascending doc id, ranks from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredList {
    pub query_id: String,
    pub system: System,
    pub entries: Vec<ScoredDoc>,
}

impl ScoredList {
    /// Sorts `scores`, keeps the top `depth` and assigns ranks.
    pub fn ranked(query_id: &str, system: System, mut scores: Vec<(String, f64)>, depth: usize) -> Self {
        scores.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        scores.truncate(depth);
        let entries = scores
            .into_iter()
            .enumerate()
            .map(|(i, (doc_id, score))| ScoredDoc {
                doc_id,
                score,
                rank: i + 1,
            })
            .collect();
        Self {
            query_id: query_id.to_string(),
            system,
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.doc_id.as_str())
    }

    pub fn to_run_entries(&self) -> Vec<RunEntry> {
        self.entries
            .iter()
            .map(|e| RunEntry {
                query_id: self.query_id.clone(),
                doc_id: e.doc_id.clone(),
                rank: e.rank,
                score: e.score,
                tag: self.system.tag().to_string(),
            })
            .collect()
    }
}

/// Proximity of a word to a cluster: the centroid distance when it is within
/// `epsilon`, `None` otherwise.
pub fn g(centroid: &[f64], word_vector: &[f64], epsilon: f64) -> Result<Option<f64>> {
    let d = cosine_distance(centroid, word_vector)?;
    Ok((d <= epsilon).then_some(d))
}

/// Linear decay from `gamma` at distance 0 to 0 at distance `epsilon`.
pub fn f(distance: f64, gamma: f64, epsilon: f64) -> Result<f64> {
    if !(0.0..=epsilon).contains(&distance) {
        return Err(Error::Domain(format!("distance {distance} outside [0, {epsilon}]")));
    }
    // Written so that d = 0, eps/2 and eps give gamma, gamma/2 and 0 exactly.
    Ok(gamma * (1.0 - distance / epsilon))
}

/// A query word with its label and, when known, its embedding.
#[derive(Debug, Clone, Copy)]
pub struct QueryWord<'a> {
    pub surface: &'a str,
    pub label: Label,
    pub vector: Option<&'a [f64]>,
}

/// Weight a single query word gives a cluster.
///
/// Members get `gamma`. Other words soft-match through the centroid, except
/// named entities and singleton clusters, which only match exactly.
pub fn query_cluster_weight(word: &QueryWord<'_>, cluster: &Cluster, config: &QueryConfig) -> f64 {
    if cluster.words.iter().any(|w| w == word.surface) {
        return config.gamma;
    }
    if word.label == Label::NamedEntity || !cluster.accepts_members() {
        return 0.0;
    }
    let (Some(v), Some(centroid)) = (word.vector, cluster.centroid.as_deref()) else {
        return 0.0;
    };
    match g(centroid, v, config.epsilon) {
        Ok(Some(d)) => f(d, config.gamma, config.epsilon).unwrap_or(0.0),
        _ => 0.0,
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QueryVector {
    pub query_id: String,
    pub weights: BTreeMap<usize, f64>,
}

impl QueryVector {
    pub fn norm(&self) -> f64 {
        self.weights.values().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Cosine between document and query vectors; 0 when either is empty.
pub fn rsv_cosine(doc: &DocVector, query: &QueryVector) -> f64 {
    let (dn, qn) = (doc.norm, query.norm());
    if dn == 0.0 || qn == 0.0 {
        return 0.0;
    }
    let (small, large) = if doc.weights.len() <= query.weights.len() {
        (&doc.weights, &query.weights)
    } else {
        (&query.weights, &doc.weights)
    };
    let dot: f64 = small.iter().filter_map(|(c, a)| large.get(c).map(|b| a * b)).sum();
    dot / (dn * qn)
}

/// Read-only search over an index. Safe to share across threads.
#[derive(Debug, Clone, Copy)]
pub struct Searcher<'a> {
    index: &'a Index,
    config: QueryConfig,
    embeddings: Option<&'a EmbeddingTable>,
}

impl<'a> Searcher<'a> {
    pub fn new(index: &'a Index, config: QueryConfig) -> Result<Self> {
        config.check_against(index)?;
        Ok(Self {
            index,
            config,
            embeddings: None,
        })
    }

    /// Extra vectors for query words outside the corpus vocabulary.
    pub fn with_embeddings(mut self, table: &'a EmbeddingTable) -> Self {
        self.embeddings = Some(table);
        self
    }

    pub fn index(&self) -> &'a Index {
        self.index
    }

    pub fn config(&self) -> &QueryConfig {
        &self.config
    }

    pub fn word_vector(&self, surface: &str) -> Option<&'a [f64]> {
        let dim = self.index.word_vectors().dim();
        self.index.word_vector(surface).or_else(|| {
            self.embeddings
                .and_then(|t| t.get(surface))
                .filter(|v| v.len() == dim)
        })
    }

    /// Query weights summed over word occurrences.
    pub fn build_query_vector(&self, query_id: &str, tokens: &[Token]) -> QueryVector {
        let clusters = self.index.clusters();
        let mut weights: BTreeMap<usize, f64> = BTreeMap::new();
        for t in tokens {
            let word = QueryWord {
                surface: &t.surface,
                label: t.label,
                vector: self.word_vector(&t.surface),
            };
            let own = clusters.cluster_of(&t.surface);
            if let Some(id) = own {
                *weights.entry(id).or_default() += self.config.gamma;
            }
            if word.label == Label::NamedEntity || word.vector.is_none() {
                continue;
            }
            for c in clusters.clusters() {
                if Some(c.id) == own || !c.accepts_members() {
                    continue;
                }
                let w = query_cluster_weight(&word, c, &self.config);
                if w > 0.0 {
                    *weights.entry(c.id).or_default() += w;
                }
            }
        }
        weights.retain(|_, w| *w > 0.0);
        QueryVector {
            query_id: query_id.to_string(),
            weights,
        }
    }

    pub fn query_vector(&self, query: &Query) -> QueryVector {
        self.build_query_vector(&query.id, &self.index.process_query(&query.text))
    }

    pub fn search(&self, query: &Query, system: System) -> ScoredList {
        match system {
            System::Semantic => self.search_semantic(query),
            System::Bm25 => self.search_bm25(query),
            System::Combined => self.search_combined(query),
            System::AvgBaseline => self.search_avg_baseline(query),
        }
    }

    pub fn search_semantic(&self, query: &Query) -> ScoredList {
        self.semantic_at(query, self.config.k)
    }

    pub fn search_bm25(&self, query: &Query) -> ScoredList {
        self.bm25_at(query, self.config.k)
    }

    fn semantic_at(&self, query: &Query, depth: usize) -> ScoredList {
        let qvec = self.query_vector(query);
        let qnorm = qvec.norm();
        let mut dots: HashMap<usize, f64> = HashMap::new();
        for (&c, &qw) in &qvec.weights {
            for &(pos, alpha) in self.index.cluster_postings(c) {
                *dots.entry(pos).or_default() += alpha * qw;
            }
        }
        let docs = self.index.docs();
        let scores = dots
            .into_iter()
            .filter(|&(_, dot)| dot > 0.0)
            .map(|(pos, dot)| (docs[pos].id.clone(), dot / (docs[pos].vector.norm * qnorm)))
            .collect();
        ScoredList::ranked(&query.id, System::Semantic, scores, depth)
    }

    fn bm25_at(&self, query: &Query, depth: usize) -> ScoredList {
        let tokens = self.index.process_query(&query.text);
        let stats = self.index.stats();
        let params = self.index.config().bm25;
        let docs = self.index.docs();
        let mut scores: HashMap<usize, f64> = HashMap::new();
        for t in &tokens {
            let idf = bm25_idf(stats.doc_count, stats.term_df(&t.surface));
            for &(pos, tf) in self.index.term_postings(&t.surface) {
                *scores.entry(pos).or_default() += bm25_term(idf, tf, docs[pos].len, stats.avg_doc_len, params);
            }
        }
        let scores = scores
            .into_iter()
            .filter(|&(_, s)| s > 0.0)
            .map(|(pos, s)| (docs[pos].id.clone(), s))
            .collect();
        ScoredList::ranked(&query.id, System::Bm25, scores, depth)
    }

    /// Semantic and BM25 lists at fusion depth, BM25 rescaled onto the
    /// semantic score range, fused, and cut to `k`.
    pub fn search_combined(&self, query: &Query) -> ScoredList {
        let depth = self.config.fusion_depth;
        let semantic = self.semantic_at(query, depth);
        let mut lexical = self.bm25_at(query, depth);
        if !lexical.is_empty() {
            // With no semantic list the range is [0, 1] so BM25 alone orders the result.
            let (lo, hi) = match (semantic.entries.last(), semantic.entries.first()) {
                (Some(lo), Some(hi)) => (lo.score, hi.score),
                _ => (0.0, 1.0),
            };
            let raw: Vec<f64> = lexical.entries.iter().map(|e| e.score).collect();
            if let Ok(scaled) = normalize_bm25(&raw, lo, hi) {
                for (e, s) in lexical.entries.iter_mut().zip(scaled) {
                    e.score = s;
                }
            }
        }
        let mut fused = fuse(&semantic, &lexical, depth).expect("fusion depth validated at construction");
        fused.entries.truncate(self.config.k);
        fused
    }

    pub fn search_avg_baseline(&self, query: &Query) -> ScoredList {
        let tokens = self.index.process_query(&query.text);
        let terms = index::term_counts(&tokens);
        let dim = self.index.word_vectors().dim();
        let Some(qvec) = index::avg_vector(&terms, |w| self.word_vector(w), self.index.stats(), dim) else {
            return ScoredList::ranked(&query.id, System::AvgBaseline, Vec::new(), 0);
        };
        let scores = (0..self.index.doc_count())
            .filter_map(|pos| {
                let dvec = self.index.avg_vector(pos)?;
                let s = cosine(&qvec, dvec).ok()?;
                Some((self.index.docs()[pos].id.clone(), s))
            })
            .collect();
        ScoredList::ranked(&query.id, System::AvgBaseline, scores, self.config.k)
    }
}

/// Affine map of `scores` onto `[lo, hi]`. Constant input maps to the midpoint.
pub fn normalize_bm25(scores: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::Domain("cannot normalize an empty score list".into()));
    }
    if lo > hi {
        return Err(Error::Domain(format!("empty target interval [{lo}, {hi}]")));
    }
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return Ok(vec![(lo + hi) / 2.0; scores.len()]);
    }
    Ok(scores
        .iter()
        .map(|s| lo + (s - min) / (max - min) * (hi - lo))
        .collect())
}

/// Rank-weighted combination `(N - n) * s_sem + (N - m) * ln(1 + s_lex)`.
///
/// `lexical` scores must already be normalized. A document missing from one
/// list takes rank `N + 1` there, and the negative factor is clamped to zero.
pub fn fuse(semantic: &ScoredList, lexical: &ScoredList, depth: usize) -> Result<ScoredList> {
    if depth < 1 {
        return Err(Error::Domain("fusion depth must be at least 1".into()));
    }
    let n = depth as f64;
    let factor = |rank: usize| (n - rank as f64).max(0.0);
    let mut combined: BTreeMap<&str, f64> = BTreeMap::new();
    for e in semantic.entries.iter().take(depth) {
        *combined.entry(&e.doc_id).or_default() += factor(e.rank) * e.score;
    }
    for e in lexical.entries.iter().take(depth) {
        *combined.entry(&e.doc_id).or_default() += factor(e.rank) * e.score.ln_1p();
    }
    let scores = combined.into_iter().map(|(d, s)| (d.to_string(), s)).collect();
    Ok(ScoredList::ranked(&semantic.query_id, System::Combined, scores, usize::MAX))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{build_index, IndexConfig};
    use crate::io::Document;
    use crate::text::TextConfig;

    fn list(system: System, docs: &[(&str, f64)]) -> ScoredList {
        ScoredList::ranked(
            "q",
            system,
            docs.iter().map(|(d, s)| (d.to_string(), *s)).collect(),
            usize::MAX,
        )
    }

    #[test]
    fn g_and_f() {
        assert_eq!(g(&[1.0, 0.0], &[1.0, 0.0], 0.3).unwrap(), Some(0.0));
        // cos = 0.8 so d = 0.2 (up to rounding)
        let d = cosine_distance(&[1.0, 0.0], &[0.8, 0.6]).unwrap();
        assert_eq!(g(&[1.0, 0.0], &[0.8, 0.6], d).unwrap(), Some(d));
        assert_eq!(g(&[1.0, 0.0], &[0.0, 1.0], 0.3).unwrap(), None);
        assert!(g(&[0.0, 0.0], &[1.0, 0.0], 0.3).is_err());

        let (gamma, eps) = (1.7, 0.4);
        assert_eq!(f(0.0, gamma, eps).unwrap(), gamma);
        assert_eq!(f(eps, gamma, eps).unwrap(), 0.0);
        assert_eq!(f(eps / 2.0, gamma, eps).unwrap(), gamma / 2.0);
        assert!(f(-0.1, gamma, eps).is_err());
        assert!(f(0.5, gamma, eps).is_err());
    }

    #[test]
    fn weight_of_member_and_boundary() {
        let cfg = QueryConfig {
            gamma: 2.0,
            epsilon: 0.2,
            k: 10,
            fusion_depth: 10,
        };
        let c = Cluster {
            id: 0,
            centroid: Some(vec![1.0, 0.0]),
            words: vec!["car".into(), "auto".into()],
            singleton: false,
        };
        let member = QueryWord {
            surface: "auto",
            label: Label::Plain,
            vector: None,
        };
        assert_eq!(query_cluster_weight(&member, &c, &cfg), 2.0);
        let v = [0.8, 0.6];
        let at_boundary = QueryConfig {
            epsilon: cosine_distance(&[1.0, 0.0], &v).unwrap(),
            ..cfg
        };
        let outsider = QueryWord {
            surface: "vehicle",
            label: Label::Plain,
            vector: Some(&v),
        };
        assert_eq!(query_cluster_weight(&outsider, &c, &at_boundary), 0.0);
        let entity = QueryWord {
            label: Label::NamedEntity,
            vector: Some(&[1.0, 0.0]),
            ..outsider
        };
        assert_eq!(query_cluster_weight(&entity, &c, &cfg), 0.0);
    }

    #[test]
    fn rsv_examples() {
        let d = DocVector::from_weights([(1, 1.0), (2, 1.0)].into());
        let q = QueryVector {
            query_id: "q".into(),
            weights: [(1, 1.0)].into(),
        };
        assert!((rsv_cosine(&d, &q) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let prop = QueryVector {
            query_id: "q".into(),
            weights: [(1, 3.0), (2, 3.0)].into(),
        };
        assert!((rsv_cosine(&d, &prop) - 1.0).abs() < 1e-12);
        let disjoint = QueryVector {
            query_id: "q".into(),
            weights: [(7, 1.0)].into(),
        };
        assert_eq!(rsv_cosine(&d, &disjoint), 0.0);
        assert_eq!(rsv_cosine(&DocVector::default(), &q), 0.0);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_bm25(&[0.0, 10.0], 0.2, 0.8).unwrap(), [0.2, 0.8]);
        assert_eq!(normalize_bm25(&[5.0, 5.0], 0.2, 0.8).unwrap(), [0.5, 0.5]);
        assert_eq!(normalize_bm25(&[0.0, 5.0, 10.0], 0.0, 1.0).unwrap(), [0.0, 0.5, 1.0]);
        assert!(normalize_bm25(&[], 0.0, 1.0).is_err());
    }

    #[test]
    fn fusion_examples() {
        let sem = list(System::Semantic, &[("A", 0.9), ("B", 0.5)]);
        let lex = list(System::Bm25, &[("A", 0.9), ("B", 0.4)]);
        let fused = fuse(&sem, &lex, 2).unwrap();
        let a = &fused.entries[0];
        assert_eq!(a.doc_id, "A");
        assert!((a.score - (0.9 + 1.9f64.ln())).abs() < 1e-12);
        assert!((a.score - 1.541_85).abs() < 1e-5);
        // B is ranked N = 2 in both lists.
        assert_eq!(fused.entries[1].score, 0.0);
        assert!(fuse(&sem, &lex, 0).is_err());

        let only_sem = list(System::Semantic, &[("A", 0.9)]);
        let only_lex = list(System::Bm25, &[("C", 0.3)]);
        let fused = fuse(&only_sem, &only_lex, 3).unwrap();
        assert_eq!(fused.doc_ids().collect::<Vec<_>>(), ["A", "C"]);
        assert!(!fused.doc_ids().any(|d| d == "Z"));
    }

    #[test]
    fn better_semantic_rank_never_hurts() {
        let lex = list(System::Bm25, &[("A", 0.5), ("B", 0.4), ("C", 0.3)]);
        let scores = [0.6, 0.6, 0.6];
        for from in 1..=3usize {
            for to in 1..from {
                let mut order = vec!["X", "Y", "Z"];
                order[from - 1] = "B";
                let before: Vec<(&str, f64)> = order.iter().copied().zip(scores).collect();
                let mut moved = order.clone();
                moved.swap(from - 1, to - 1);
                let after: Vec<(&str, f64)> = moved.iter().copied().zip(scores).collect();
                let s = |l: &[(&str, f64)]| {
                    let sem = list(System::Semantic, l);
                    let fused = fuse(&sem, &lex, 3).unwrap();
                    fused.entries.iter().find(|e| e.doc_id == "B").unwrap().score
                };
                assert!(s(&after) >= s(&before));
            }
        }
    }

    #[test]
    fn system_names() {
        for s in System::ALL {
            assert_eq!(s.tag().parse::<System>().unwrap(), s);
        }
        assert!(matches!("dense".parse::<System>(), Err(Error::Config(_))));
    }

    fn tiny_index() -> Index {
        let mut t = EmbeddingTable::new(2);
        t.insert("car", vec![1.0, 0.0]).unwrap();
        t.insert("engine", vec![0.0, 1.0]).unwrap();
        let corpus = [
            Document::new("d1", "car car engine"),
            Document::new("d2", "engine oil"),
            Document::new("d3", "tea"),
            Document::new("d4", "tea cup"),
        ];
        let config = IndexConfig {
            text: TextConfig::with_rw_threshold(0),
            epsilon: 0.1,
            ..IndexConfig::default()
        };
        build_index(&corpus, &t, &config).unwrap()
    }

    #[test]
    fn query_vector_sums_occurrences() {
        let index = tiny_index();
        let s = Searcher::new(&index, QueryConfig::for_index(&index)).unwrap();
        let q = s.query_vector(&Query::new("q", "car car"));
        let car = index.clusters().cluster_of("car").unwrap();
        assert_eq!(q.weights.get(&car), Some(&2.0));
        assert!(s.query_vector(&Query::new("q", "")).is_empty());
    }

    #[test]
    fn out_of_vocabulary_word_soft_matches() {
        let index = tiny_index();
        let mut extra = EmbeddingTable::new(2);
        extra.insert("automobile", vec![1.0, 0.05]).unwrap();
        let s = Searcher::new(&index, QueryConfig::for_index(&index))
            .unwrap()
            .with_embeddings(&extra);
        let q = s.query_vector(&Query::new("q", "automobile"));
        let car = index.clusters().cluster_of("car").unwrap();
        assert_eq!(q.weights.len(), 1);
        assert!(q.weights[&car] > 0.0);
        let hits = s.search_semantic(&Query::new("q", "automobile"));
        assert_eq!(hits.entries[0].doc_id, "d1");
    }

    #[test]
    fn no_overlap_gives_empty_lists() {
        let index = tiny_index();
        let s = Searcher::new(&index, QueryConfig::for_index(&index)).unwrap();
        let q = Query::new("q", "zebra");
        assert!(s.search_semantic(&q).is_empty());
        assert!(s.search_bm25(&q).is_empty());
        assert!(s.search_combined(&q).is_empty());
        assert!(s.search_avg_baseline(&q).is_empty());
    }

    #[test]
    fn mismatched_parameters_rejected() {
        let index = tiny_index();
        let cfg = QueryConfig {
            epsilon: 0.2,
            ..QueryConfig::for_index(&index)
        };
        assert!(matches!(Searcher::new(&index, cfg), Err(Error::Config(_))));
        let cfg = QueryConfig {
            gamma: 3.0,
            ..QueryConfig::for_index(&index)
        };
        assert!(matches!(Searcher::new(&index, cfg), Err(Error::Config(_))));
    }

    #[test]
    fn avg_vector_of_single_token_is_its_vector() {
        let index = tiny_index();
        let pos = index.doc_position("d2").unwrap();
        let oil_missing = index.word_vector("oil").is_none();
        assert!(oil_missing);
        // "engine oil": only "engine" has a vector.
        let v = index.avg_vector(pos).unwrap();
        assert_eq!(v, index.word_vector("engine").unwrap());
    }
}
