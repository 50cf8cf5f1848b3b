//! Single-pass word clustering with frozen centroids.
//!
//! Words are inserted one at a time. A plain word joins the closest existing
//! cluster whose centroid lies within cosine distance `epsilon`, or seeds a new
//! cluster with its own vector as the centroid. Named entities, rare words and
//! words without an embedding always get a cluster of their own.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::EmbeddingTable;
use crate::text::{Label, Vocabulary};

/// Threshold used when no synonym pairs are available to estimate one.
pub const DEFAULT_EPSILON: f64 = 0.35;

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Domain(format!(
            "cosine of vectors with {} and {} components",
            u.len(),
            v.len()
        )));
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::Domain("cosine of a zero vector".into()));
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// `1 - cosine(u, v)`, in `[0, 2]`.
pub fn cosine_distance(u: &[f64], v: &[f64]) -> Result<f64> {
    Ok(1.0 - cosine(u, v)?)
}

/// Mean cosine distance over word pairs known to be synonyms.
pub fn estimate_epsilon<S: AsRef<str>>(pairs: &[(S, S)], table: &EmbeddingTable) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Domain("epsilon estimation needs at least one synonym pair".into()));
    }
    let lookup = |w: &str| {
        table
            .get(w)
            .ok_or_else(|| Error::Lookup(format!("no embedding for synonym-pair word {w:?}")))
    };
    let mut total = 0.0;
    for (a, b) in pairs {
        total += cosine_distance(lookup(a.as_ref())?, lookup(b.as_ref())?)?;
    }
    Ok(total / pairs.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub epsilon: f64,
}

impl ClusterConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Validation(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        Ok(Self { epsilon })
    }
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: usize,
    /// Vector of the first word inserted. `None` for words without an embedding.
    pub centroid: Option<Vec<f64>>,
    pub words: Vec<String>,
    pub singleton: bool,
}

impl Cluster {
    /// Whether plain words may join this cluster or soft-match it from a query.
    pub fn accepts_members(&self) -> bool {
        !self.singleton && self.centroid.is_some()
    }
}

/// A word offered for insertion.
#[derive(Debug, Clone, Copy)]
pub struct WordEntry<'a> {
    pub surface: &'a str,
    pub label: Label,
    pub vector: Option<&'a [f64]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Insertion {
    pub cluster: usize,
    pub created: bool,
    /// Clusters that existed when the word arrived.
    pub clusters_before: usize,
    /// Centroid distance evaluations performed.
    pub distance_evals: usize,
    /// Distance to the joined cluster's centroid, when it joined one.
    pub distance: Option<f64>,
}

/// Disjoint clusters covering every inserted word.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Cluster>", into = "Vec<Cluster>")]
pub struct ClusterSet {
    clusters: Vec<Cluster>,
    word_to_cluster: HashMap<String, usize>,
}

impl From<Vec<Cluster>> for ClusterSet {
    fn from(clusters: Vec<Cluster>) -> Self {
        let word_to_cluster = clusters
            .iter()
            .flat_map(|c| c.words.iter().map(move |w| (w.clone(), c.id)))
            .collect();
        Self {
            clusters,
            word_to_cluster,
        }
    }
}

impl From<ClusterSet> for Vec<Cluster> {
    fn from(set: ClusterSet) -> Self {
        set.clusters
    }
}

impl ClusterSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn get(&self, id: usize) -> Option<&Cluster> {
        self.clusters.get(id)
    }

    pub fn cluster_of(&self, surface: &str) -> Option<usize> {
        self.word_to_cluster.get(surface).copied()
    }

    pub fn word_count(&self) -> usize {
        self.word_to_cluster.len()
    }

    /// Checks disjointness, id order, map consistency and singleton sizes.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashMap::new();
        for (i, c) in self.clusters.iter().enumerate() {
            if c.id != i {
                return Err(Error::Corrupt(format!("cluster at position {i} has id {}", c.id)));
            }
            if c.words.is_empty() || (c.singleton && c.words.len() != 1) {
                return Err(Error::Corrupt(format!("cluster {i} has {} words", c.words.len())));
            }
            for w in &c.words {
                if seen.insert(w.as_str(), i).is_some() {
                    return Err(Error::Corrupt(format!("word {w:?} is in more than one cluster")));
                }
            }
        }
        if seen.len() != self.word_to_cluster.len()
            || seen.iter().any(|(w, &i)| self.word_to_cluster.get(*w) != Some(&i))
        {
            return Err(Error::Corrupt("word map disagrees with cluster word lists".into()));
        }
        Ok(())
    }

    /// Closest member-accepting cluster within `epsilon`, lowest id on ties.
    pub fn find_closest_cluster(&self, vector: &[f64], epsilon: f64) -> Option<usize> {
        self.closest(vector, epsilon).0.map(|(id, _)| id)
    }

    fn closest(&self, vector: &[f64], epsilon: f64) -> (Option<(usize, f64)>, usize) {
        let mut best: Option<(usize, f64)> = None;
        let mut evals = 0;
        for c in &self.clusters {
            let Some(centroid) = c.centroid.as_deref().filter(|_| !c.singleton) else {
                continue;
            };
            evals += 1;
            let Ok(d) = cosine_distance(centroid, vector) else {
                continue;
            };
            if d <= epsilon && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((c.id, d));
            }
        }
        (best, evals)
    }

    /// Inserts one word following the single-pass rule.
    pub fn insert_word(&mut self, word: WordEntry<'_>, epsilon: f64) -> Result<Insertion> {
        if self.word_to_cluster.contains_key(word.surface) {
            return Err(Error::Validation(format!(
                "word {:?} is already clustered",
                word.surface
            )));
        }
        let clusters_before = self.clusters.len();
        let forced_alone = word.label.is_singleton() || word.vector.is_none();
        let (target, evals) = match word.vector {
            Some(v) if !forced_alone && !self.clusters.is_empty() => self.closest(v, epsilon),
            _ => (None, 0),
        };
        let outcome = match target {
            Some((id, d)) => {
                self.clusters[id].words.push(word.surface.to_string());
                Insertion {
                    cluster: id,
                    created: false,
                    clusters_before,
                    distance_evals: evals,
                    distance: Some(d),
                }
            }
            None => {
                let id = self.clusters.len();
                self.clusters.push(Cluster {
                    id,
                    centroid: word.vector.map(<[f64]>::to_vec),
                    words: vec![word.surface.to_string()],
                    singleton: forced_alone,
                });
                Insertion {
                    cluster: id,
                    created: true,
                    clusters_before,
                    distance_evals: evals,
                    distance: None,
                }
            }
        };
        self.word_to_cluster.insert(word.surface.to_string(), outcome.cluster);
        Ok(outcome)
    }
}

/// Vocabulary surfaces in insertion order: descending term frequency, then lexicographic.
pub fn insertion_order(vocabulary: &Vocabulary) -> Vec<&str> {
    let mut words: Vec<(&str, u64)> = vocabulary.iter().map(|(w, e)| (w, e.tf)).collect();
    words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    words.into_iter().map(|(w, _)| w).collect()
}

/// Clusters every vocabulary word once. Words missing from `table` become singletons.
pub fn build_clusters(
    vocabulary: &Vocabulary,
    table: &EmbeddingTable,
    config: &ClusterConfig,
) -> Result<ClusterSet> {
    let mut set = ClusterSet::new();
    for surface in insertion_order(vocabulary) {
        let label = vocabulary.get(surface).map_or(Label::Plain, |e| e.label);
        set.insert_word(
            WordEntry {
                surface,
                label,
                vector: table.get(surface),
            },
            config.epsilon,
        )?;
    }
    Ok(set)
}
