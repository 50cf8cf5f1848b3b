//! On-disk index layout.
//!
//! ```text
//! <dir>/manifest.json     format version and every score-affecting parameter
//! <dir>/text.json         stopwords, gazetteer, rare-word threshold
//! <dir>/vocabulary.json
//! <dir>/clusters.json     ids, frozen centroids, word lists
//! <dir>/documents.json    per-document term counts and cluster weights
//! <dir>/stats.json        N, N_i, average length, term document frequencies
//! <dir>/vectors.txt       embeddings of the vocabulary, text word-vector format
//! ```

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::embeddings::{load_embeddings, write_embeddings};
use super::write_atomic;
use crate::cluster::ClusterSet;
use crate::error::{Error, Result};
use crate::index::{Bm25Params, CorpusStats, DocRecord, DocVector, EpsilonSource, Index, IndexConfig};
use crate::text::{TextConfig, Vocabulary};

pub const FORMAT_VERSION: &str = "semclust-index/1";

const MANIFEST: &str = "manifest.json";
const TEXT: &str = "text.json";
const VOCABULARY: &str = "vocabulary.json";
const CLUSTERS: &str = "clusters.json";
const DOCUMENTS: &str = "documents.json";
const STATS: &str = "stats.json";
const VECTORS: &str = "vectors.txt";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: String,
    pub epsilon: f64,
    pub epsilon_source: EpsilonSource,
    pub gamma: f64,
    pub k1: f64,
    pub b: f64,
    pub rw_threshold: u64,
    pub log_base: String,
    pub documents: usize,
    pub clusters: usize,
    pub vocabulary: usize,
}

#[derive(Serialize, Deserialize)]
struct StoredDoc {
    id: String,
    len: u64,
    terms: crate::index::TermCounts,
    weights: std::collections::BTreeMap<usize, f64>,
}

#[derive(Serialize, Deserialize)]
struct StoredText {
    stopwords: Vec<String>,
    gazetteer: Vec<String>,
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::Validation(format!("serializing {name}: {e}")))?;
    bytes.push(b'\n');
    write_atomic(&dir.join(name), &bytes)
}

fn read_json<T: DeserializeOwned>(dir: &Path, name: &str) -> Result<T> {
    let path = dir.join(name);
    let raw = std::fs::read(&path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::Corrupt(format!("missing {}", path.display())),
        _ => Error::io(&path, e),
    })?;
    serde_json::from_slice(&raw).map_err(|e| Error::Corrupt(format!("{}: {e}", path.display())))
}

pub fn manifest_of(index: &Index) -> Manifest {
    let config = index.config();
    Manifest {
        format_version: FORMAT_VERSION.to_string(),
        epsilon: config.epsilon,
        epsilon_source: config.epsilon_source,
        gamma: config.gamma,
        k1: config.bm25.k1,
        b: config.bm25.b,
        rw_threshold: config.text.rw_threshold,
        log_base: "e".to_string(),
        documents: index.doc_count(),
        clusters: index.clusters().len(),
        vocabulary: index.vocabulary().len(),
    }
}

/// Writes the index into `dir`, creating it if needed. Each file is replaced atomically.
pub fn save_index(index: &Index, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let text = index.text_config();
    write_json(
        dir,
        TEXT,
        &StoredText {
            stopwords: text.stopwords.iter().cloned().collect(),
            gazetteer: text.gazetteer.iter().cloned().collect(),
        },
    )?;
    write_json(dir, VOCABULARY, index.vocabulary())?;
    write_json(dir, CLUSTERS, index.clusters())?;
    let docs: Vec<StoredDoc> = index
        .docs()
        .iter()
        .map(|d| StoredDoc {
            id: d.id.clone(),
            len: d.len,
            terms: d.terms.clone(),
            weights: d.vector.weights.clone(),
        })
        .collect();
    write_json(dir, DOCUMENTS, &docs)?;
    write_json(dir, STATS, index.stats())?;
    let vectors_path = dir.join(VECTORS);
    let tmp = dir.join(".vectors.txt.tmp");
    write_embeddings(index.word_vectors(), &tmp)?;
    std::fs::rename(&tmp, &vectors_path).map_err(|e| Error::io(&vectors_path, e))?;
    // Manifest last: a directory without one is never mistaken for a complete index.
    write_json(dir, MANIFEST, &manifest_of(index))
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let value: serde_json::Value = read_json(dir, MANIFEST)?;
    let version = value
        .get("format_version")
        .and_then(|v| v.as_str())
        .unwrap_or_default();
    if version != FORMAT_VERSION {
        return Err(Error::Incompatible {
            found: version.to_string(),
            expected: FORMAT_VERSION.to_string(),
        });
    }
    serde_json::from_value(value).map_err(|e| Error::Corrupt(format!("manifest: {e}")))
}

pub fn load_index(dir: &Path) -> Result<Index> {
    let manifest = read_manifest(dir)?;
    let text: StoredText = read_json(dir, TEXT)?;
    let vocabulary: Vocabulary = read_json(dir, VOCABULARY)?;
    let clusters: ClusterSet = read_json(dir, CLUSTERS)?;
    let stored: Vec<StoredDoc> = read_json(dir, DOCUMENTS)?;
    let stats: CorpusStats = read_json(dir, STATS)?;
    let vectors_path = dir.join(VECTORS);
    if !vectors_path.exists() {
        return Err(Error::Corrupt(format!("missing {}", vectors_path.display())));
    }
    let vectors = load_embeddings(&vectors_path, None)
        .map_err(|e| Error::Corrupt(format!("{}: {e}", vectors_path.display())))?;

    clusters.validate()?;
    if stats.cluster_df.len() != clusters.len() || stored.len() != stats.doc_count as usize {
        return Err(Error::Corrupt("statistics disagree with clusters or documents".into()));
    }
    if manifest.documents != stored.len()
        || manifest.clusters != clusters.len()
        || manifest.vocabulary != vocabulary.len()
    {
        return Err(Error::Corrupt("manifest counts disagree with stored data".into()));
    }

    let config = IndexConfig {
        text: TextConfig {
            stopwords: text.stopwords.into_iter().collect(),
            gazetteer: text.gazetteer.into_iter().collect(),
            rw_threshold: manifest.rw_threshold,
        },
        epsilon: manifest.epsilon,
        epsilon_source: manifest.epsilon_source,
        gamma: manifest.gamma,
        bm25: Bm25Params {
            k1: manifest.k1,
            b: manifest.b,
        },
    };
    config.validate().map_err(|e| Error::Corrupt(format!("manifest: {e}")))?;
    let docs = stored
        .into_iter()
        .map(|d| DocRecord {
            id: d.id,
            len: d.len,
            terms: d.terms,
            vector: DocVector::from_weights(d.weights),
        })
        .collect();
    Index::from_parts(config, vocabulary, clusters, vectors, docs, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::build_index;
    use crate::io::{Document, EmbeddingTable};

    fn small_index() -> Index {
        let mut table = EmbeddingTable::new(2);
        table.insert("cat", vec![1.0, 0.0]).unwrap();
        table.insert("kitten", vec![0.99, 0.05]).unwrap();
        table.insert("dog", vec![0.0, 1.0]).unwrap();
        let corpus = [
            Document::new("1", "the cat and the kitten"),
            Document::new("2", "a dog barks at Rex"),
            Document::new("3", "dog food"),
        ];
        let mut config = IndexConfig::default();
        config.text.stopwords = ["the", "a", "and", "at"].iter().map(|s| s.to_string()).collect();
        build_index(&corpus, &table, &config).unwrap()
    }

    #[test]
    fn roundtrip_is_equal() {
        let index = small_index();
        let dir = tempfile::tempdir().unwrap();
        save_index(&index, dir.path()).unwrap();
        let back = load_index(dir.path()).unwrap();
        assert_eq!(back, index);
    }

    #[test]
    fn empty_directory_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_index(dir.path()), Err(Error::Corrupt(_))));
    }

    #[test]
    fn missing_component_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        save_index(&small_index(), dir.path()).unwrap();
        std::fs::remove_file(dir.path().join(CLUSTERS)).unwrap();
        assert!(matches!(load_index(dir.path()), Err(Error::Corrupt(_))));
    }

    #[test]
    fn version_mismatch_is_incompatible() {
        let dir = tempfile::tempdir().unwrap();
        save_index(&small_index(), dir.path()).unwrap();
        let path = dir.path().join(MANIFEST);
        let raw = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, raw.replace(FORMAT_VERSION, "semclust-index/0")).unwrap();
        assert!(matches!(load_index(dir.path()), Err(Error::Incompatible { .. })));
    }

    #[test]
    fn saves_are_byte_identical() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        save_index(&small_index(), a.path()).unwrap();
        save_index(&small_index(), b.path()).unwrap();
        for name in [MANIFEST, TEXT, VOCABULARY, CLUSTERS, DOCUMENTS, STATS, VECTORS] {
            let x = std::fs::read(a.path().join(name)).unwrap();
            let y = std::fs::read(b.path().join(name)).unwrap();
            assert_eq!(x, y, "{name} differs");
        }
    }
}
