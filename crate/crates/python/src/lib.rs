//! Python bindings for building, saving, loading and querying indexes, and
//! for the evaluation helpers.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::PathBuf;

use pyo3::exceptions::{PyKeyError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use semclust::cluster::{self, estimate_epsilon as mean_pair_distance};
use semclust::eval::{self, Metric};
use semclust::index::{Bm25Params, EpsilonSource};
use semclust::io::{self as sio, SynonymLexicon};
use semclust::text::{document_tokens, TextConfig};
use semclust::{
    build_index, Document, EmbeddingTable, Error, Index, IndexConfig, Qrels, Query, QueryConfig, RunEntry, Searcher,
    System,
};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::Lookup(_) => PyKeyError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for semclust::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn system(name: &str) -> PyResult<System> {
    name.parse::<System>().py()
}

/// A built or loaded index. Extra word vectors for out-of-vocabulary query
/// words can be attached with `attach_embeddings`.
#[pyclass(name = "Index", module = "semclust_py")]
struct PyIndex {
    inner: Index,
    extra: Option<EmbeddingTable>,
}

#[pymethods]
impl PyIndex {
    /// Builds an index from `(doc_id, text)` pairs and a text-format vector file.
    #[staticmethod]
    #[pyo3(signature = (corpus, embeddings, *, epsilon = None, synonym_pairs = None, gamma = 1.0, k1 = 1.2, b = 0.75,
        rw_threshold = 1, stopwords = None, gazetteer = None))]
    #[allow(clippy::too_many_arguments)]
    fn build(
        corpus: Vec<(String, String)>,
        embeddings: PathBuf,
        epsilon: Option<f64>,
        synonym_pairs: Option<Vec<(String, String)>>,
        gamma: f64,
        k1: f64,
        b: f64,
        rw_threshold: u64,
        stopwords: Option<Vec<String>>,
        gazetteer: Option<Vec<String>>,
    ) -> PyResult<Self> {
        let lower = |ws: Option<Vec<String>>| -> BTreeSet<String> {
            ws.into_iter().flatten().map(|w| w.to_lowercase()).collect()
        };
        let text = TextConfig {
            stopwords: lower(stopwords),
            gazetteer: lower(gazetteer),
            rw_threshold,
        };
        let docs: Vec<Document> = corpus.into_iter().map(|(id, t)| Document::new(id, t)).collect();
        let mut wanted: HashSet<String> =
            docs.iter().flat_map(|d| document_tokens(d, &text)).map(|t| t.surface).collect();
        for (a, b) in synonym_pairs.iter().flatten() {
            wanted.insert(a.clone());
            wanted.insert(b.clone());
        }
        let table = sio::load_embeddings(&embeddings, Some(&wanted)).py()?;
        let (epsilon, epsilon_source) = match (epsilon, &synonym_pairs) {
            (Some(e), _) => (e, EpsilonSource::Override),
            (None, Some(p)) => (mean_pair_distance(p, &table).py()?, EpsilonSource::Estimated),
            (None, None) => (cluster::DEFAULT_EPSILON, EpsilonSource::Default),
        };
        let config = IndexConfig {
            text,
            epsilon,
            epsilon_source,
            gamma,
            bm25: Bm25Params { k1, b },
        };
        Ok(Self {
            inner: build_index(&docs, &table, &config).py()?,
            extra: None,
        })
    }

    #[staticmethod]
    fn load(dir: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: sio::load_index(&dir).py()?,
            extra: None,
        })
    }

    fn save(&self, dir: PathBuf) -> PyResult<()> {
        sio::save_index(&self.inner, &dir).py()
    }

    /// Loads vectors for query words the corpus never used.
    fn attach_embeddings(&mut self, path: PathBuf) -> PyResult<()> {
        self.extra = Some(sio::load_embeddings(&path, None).py()?);
        Ok(())
    }

    /// Adds `(doc_id, text)` documents; unseen words are clustered without moving centroids.
    #[pyo3(signature = (docs, embeddings = None))]
    fn add_documents(&mut self, docs: Vec<(String, String)>, embeddings: Option<PathBuf>) -> PyResult<()> {
        let docs: Vec<Document> = docs.into_iter().map(|(id, t)| Document::new(id, t)).collect();
        let table = embeddings.map(|p| sio::load_embeddings(&p, None)).transpose().py()?;
        self.inner.add_documents(&docs, table.as_ref().or(self.extra.as_ref())).py()
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.config().epsilon
    }

    #[getter]
    fn epsilon_source(&self) -> &'static str {
        match self.inner.config().epsilon_source {
            EpsilonSource::Estimated => "estimated",
            EpsilonSource::Override => "override",
            EpsilonSource::Default => "default",
        }
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.config().gamma
    }

    #[getter]
    fn doc_count(&self) -> usize {
        self.inner.doc_count()
    }

    #[getter]
    fn vocabulary_size(&self) -> usize {
        self.inner.vocabulary().len()
    }

    #[getter]
    fn cluster_count(&self) -> usize {
        self.inner.clusters().len()
    }

    /// Word lists of every cluster, indexed by cluster id.
    fn clusters(&self) -> Vec<Vec<String>> {
        self.inner.clusters().clusters().iter().map(|c| c.words.clone()).collect()
    }

    fn cluster_of(&self, word: &str) -> Option<usize> {
        self.inner.clusters().cluster_of(word)
    }

    /// Ranked `(doc_id, score)` pairs for one query text.
    #[pyo3(signature = (text, system = "combined", k = 50, fusion_n = 100))]
    fn search(&self, text: &str, system: &str, k: usize, fusion_n: usize) -> PyResult<Vec<(String, f64)>> {
        let list = self.searcher(k, fusion_n)?.search(&Query::new("q", text), self::system(system)?);
        Ok(list.entries.into_iter().map(|e| (e.doc_id, e.score)).collect())
    }

    /// Run entries `(query_id, doc_id, rank, score)` for `(query_id, text)` queries.
    #[pyo3(signature = (queries, system = "combined", k = 50, fusion_n = 100))]
    fn run(
        &self,
        queries: Vec<(String, String)>,
        system: &str,
        k: usize,
        fusion_n: usize,
    ) -> PyResult<Vec<(String, String, usize, f64)>> {
        let searcher = self.searcher(k, fusion_n)?;
        let system = self::system(system)?;
        Ok(queries
            .into_iter()
            .flat_map(|(id, text)| searcher.search(&Query::new(id, text), system).to_run_entries())
            .map(|e| (e.query_id, e.doc_id, e.rank, e.score))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Index(documents={}, vocabulary={}, clusters={}, epsilon={})",
            self.inner.doc_count(),
            self.inner.vocabulary().len(),
            self.inner.clusters().len(),
            self.inner.config().epsilon
        )
    }
}

impl PyIndex {
    fn searcher(&self, k: usize, fusion_n: usize) -> PyResult<Searcher<'_>> {
        let config = QueryConfig {
            k,
            fusion_depth: fusion_n,
            ..QueryConfig::for_index(&self.inner)
        };
        let s = Searcher::new(&self.inner, config).py()?;
        Ok(match &self.extra {
            Some(t) => s.with_embeddings(t),
            None => s,
        })
    }
}

fn to_entries(run: Vec<(String, String, usize, f64)>, tag: &str) -> Vec<RunEntry> {
    run.into_iter()
        .map(|(query_id, doc_id, rank, score)| RunEntry {
            query_id,
            doc_id,
            rank,
            score,
            tag: tag.to_string(),
        })
        .collect()
}

fn to_qrels(judgments: Vec<(String, String, u32)>) -> Qrels {
    let mut qrels = Qrels::new();
    for (q, d, g) in judgments {
        qrels.insert(q, d, g);
    }
    qrels
}

/// MAP, R-Prec, MRR, P@k and R@k for run entries `(query_id, doc_id, rank, score)`
/// against judgments `(query_id, doc_id, grade)`.
#[pyfunction]
#[pyo3(signature = (run, qrels, cutoffs = vec![5, 10, 20]))]
fn evaluate<'py>(
    py: Python<'py>,
    run: Vec<(String, String, usize, f64)>,
    qrels: Vec<(String, String, u32)>,
    cutoffs: Vec<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let report = eval::evaluate_run(&to_entries(run, "run"), &to_qrels(qrels), &cutoffs).py()?;
    let out = PyDict::new(py);
    out.set_item("map", report.map)?;
    out.set_item("r_prec", report.mean_r_prec)?;
    out.set_item("mrr", report.mrr)?;
    out.set_item("precision", &report.mean_precision)?;
    out.set_item("recall", &report.mean_recall)?;
    out.set_item("queries", report.query_count)?;
    out.set_item("skipped", &report.skipped)?;
    let per_query: BTreeMap<&str, BTreeMap<&str, f64>> = report
        .per_query
        .iter()
        .map(|(q, m)| (q.as_str(), BTreeMap::from([("ap", m.ap), ("r_prec", m.r_prec), ("rr", m.rr)])))
        .collect();
    out.set_item("per_query", per_query)?;
    Ok(out)
}

/// Paired t-test of `a - b`. `t` is `None` when every difference is zero.
#[pyfunction]
fn paired_t_test<'py>(py: Python<'py>, a: Vec<f64>, b: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let r = eval::paired_t_test(&a, &b).py()?;
    let out = PyDict::new(py);
    out.set_item("t", r.t)?;
    out.set_item("df", r.df)?;
    out.set_item("p_value", r.p_value)?;
    out.set_item("mean_difference", r.mean_difference)?;
    out.set_item("no_difference", r.no_difference)?;
    Ok(out)
}

/// Paired t-test between two runs on a per-query metric (`ap`, `rprec`, `rr`, `p@k`, `r@k`).
#[pyfunction]
#[pyo3(signature = (run_a, run_b, qrels, metric = "ap"))]
fn compare_runs<'py>(
    py: Python<'py>,
    run_a: Vec<(String, String, usize, f64)>,
    run_b: Vec<(String, String, usize, f64)>,
    qrels: Vec<(String, String, u32)>,
    metric: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let metric: Metric = metric.parse().py()?;
    let qrels = to_qrels(qrels);
    let cutoffs: Vec<usize> = metric.cutoff().into_iter().collect();
    let series = |run| -> PyResult<BTreeMap<String, f64>> {
        eval::evaluate_run(&to_entries(run, "run"), &qrels, &cutoffs).py()?.series(metric).py()
    };
    let r = eval::paired_t_test_by_query(&series(run_a)?, &series(run_b)?).py()?;
    let out = PyDict::new(py);
    out.set_item("t", r.t)?;
    out.set_item("df", r.df)?;
    out.set_item("p_value", r.p_value)?;
    out.set_item("mean_difference", r.mean_difference)?;
    out.set_item("no_difference", r.no_difference)?;
    Ok(out)
}

/// Rewrites `(query_id, text)` queries with lexicon synonyms, each mapped word with probability `p`.
#[pyfunction]
#[pyo3(signature = (queries, lexicon, p, seed = 0))]
fn reformulate(
    queries: Vec<(String, String)>,
    lexicon: BTreeMap<String, Vec<String>>,
    p: f64,
    seed: u64,
) -> PyResult<Vec<(String, String)>> {
    let queries: Vec<Query> = queries.into_iter().map(|(id, t)| Query::new(id, t)).collect();
    let lexicon = SynonymLexicon::new(lexicon).py()?;
    Ok(eval::reformulate_queries(&queries, &lexicon, p, seed)
        .py()?
        .into_iter()
        .map(|q| (q.id, q.text))
        .collect())
}

/// Mean cosine distance over synonym pairs, read from a text-format vector file.
#[pyfunction]
fn estimate_epsilon(pairs: Vec<(String, String)>, embeddings: PathBuf) -> PyResult<f64> {
    let wanted: HashSet<String> = pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    let table = sio::load_embeddings(&embeddings, Some(&wanted)).py()?;
    mean_pair_distance(&pairs, &table).py()
}

#[pyfunction]
fn cosine(u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
    cluster::cosine(&u, &v).py()
}

#[pymodule]
fn semclust_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyIndex>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(paired_t_test, m)?)?;
    m.add_function(wrap_pyfunction!(compare_runs, m)?)?;
    m.add_function(wrap_pyfunction!(reformulate, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_epsilon, m)?)?;
    m.add_function(wrap_pyfunction!(cosine, m)?)?;
    m.add("SYSTEMS", System::ALL.map(System::tag).to_vec())?;
    Ok(())
}
