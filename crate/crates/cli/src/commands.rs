use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::Path;

use semclust::cluster::{cosine_distance, estimate_epsilon as mean_pair_distance, DEFAULT_EPSILON};
use semclust::eval::{evaluate_run, paired_t_test_by_query, reformulate_queries, Metric};
use semclust::index::{Bm25Params, EpsilonSource};
use semclust::io::{
    load_embeddings, load_index, manifest_of, read_corpus, read_lexicon, read_qrels, read_queries, read_run,
    read_synonym_pairs, read_word_list, save_index, write_atomic, write_queries, write_run,
};
use semclust::text::{document_tokens, TextConfig};
use semclust::{build_index, query, Index, IndexConfig, QueryConfig, Searcher, System};

use crate::config::{require, RunConfig};
use crate::CliError;

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(|e| CliError::io(format!("stdout: {e}")))?
    };
}

const PARAM_TOLERANCE: f64 = 1e-12;

fn text_config(c: &RunConfig) -> Result<TextConfig, CliError> {
    let mut text = TextConfig::with_rw_threshold(c.rw_threshold.unwrap_or(1));
    if let Some(p) = &c.stopwords {
        text.stopwords = read_word_list(p)?;
    }
    if let Some(p) = &c.gazetteer {
        text.gazetteer = read_word_list(p)?;
    }
    Ok(text)
}

pub fn index(c: &RunConfig, out: &mut impl Write) -> Result<(), CliError> {
    let corpus = read_corpus(require(&c.corpus, "corpus")?)?;
    let embeddings_path = require(&c.embeddings, "embeddings")?;
    let dir = require(&c.index_dir, "index-dir")?;
    let text = text_config(c)?;
    let pairs = c.synonym_pairs.as_deref().map(read_synonym_pairs).transpose()?;

    // Only corpus words and pair words are needed from the (large) vector file.
    let mut wanted: HashSet<String> = corpus
        .iter()
        .flat_map(|d| document_tokens(d, &text))
        .map(|t| t.surface)
        .collect();
    for (a, b) in pairs.iter().flatten() {
        wanted.insert(a.clone());
        wanted.insert(b.clone());
    }
    let table = load_embeddings(embeddings_path, Some(&wanted))?;

    let (epsilon, source) = match (c.epsilon, &pairs) {
        (Some(e), _) => (e, EpsilonSource::Override),
        (None, Some(pairs)) => (mean_pair_distance(pairs, &table)?, EpsilonSource::Estimated),
        (None, None) => (DEFAULT_EPSILON, EpsilonSource::Default),
    };
    let defaults = Bm25Params::default();
    let config = IndexConfig {
        text,
        epsilon,
        epsilon_source: source,
        gamma: c.gamma.unwrap_or(1.0),
        bm25: Bm25Params {
            k1: c.k1.unwrap_or(defaults.k1),
            b: c.b.unwrap_or(defaults.b),
        },
    };
    let index = build_index(&corpus, &table, &config)?;
    save_index(&index, dir)?;

    let source = match source {
        EpsilonSource::Estimated => "estimated from synonym pairs",
        EpsilonSource::Override => "set explicitly",
        EpsilonSource::Default => "default, no synonym pairs given",
    };
    say!(out, "documents: {}", index.doc_count());
    say!(out, "vocabulary: {}", index.vocabulary().len());
    say!(out, "clusters: {}", index.clusters().len());
    say!(out, "epsilon: {epsilon} ({source})");
    say!(out, "index written to {}", dir.display());
    Ok(())
}

fn parse_system(name: &str) -> Result<System, CliError> {
    name.parse()
        .map_err(|_| CliError::usage(format!("unknown system {name:?}; expected semantic, bm25, combined or avg-baseline")))
}

/// Refuses parameters that differ from the ones the index was built with.
fn check_manifest(c: &RunConfig, index: &Index) -> Result<(), CliError> {
    let built = index.config();
    for (name, asked, stored) in [
        ("epsilon", c.epsilon, built.epsilon),
        ("gamma", c.gamma, built.gamma),
        ("k1", c.k1, built.bm25.k1),
        ("b", c.b, built.bm25.b),
    ] {
        if let Some(asked) = asked {
            if (asked - stored).abs() > PARAM_TOLERANCE {
                return Err(semclust::Error::Config(format!(
                    "{name} {asked} differs from the index manifest value {stored}; rebuild the index to change it"
                ))
                .into());
            }
        }
    }
    if let Some(t) = c.rw_threshold {
        if t != built.text.rw_threshold {
            return Err(semclust::Error::Config(format!(
                "rw-threshold {t} differs from the index manifest value {}",
                built.text.rw_threshold
            ))
            .into());
        }
    }
    Ok(())
}

pub fn search(c: &RunConfig, output: &Path, out: &mut impl Write) -> Result<(), CliError> {
    let system = parse_system(c.system.as_deref().unwrap_or("combined"))?;
    let index = load_index(require(&c.index_dir, "index-dir")?)?;
    let queries = read_queries(require(&c.queries, "queries")?)?;
    check_manifest(c, &index)?;
    let qconfig = QueryConfig {
        k: c.k.unwrap_or(query::DEFAULT_K),
        fusion_depth: c.fusion_n.unwrap_or(query::DEFAULT_FUSION_DEPTH),
        ..QueryConfig::for_index(&index)
    };

    // Query words outside the corpus vocabulary can still soft-match when vectors are given.
    let extra = match &c.embeddings {
        Some(path) => {
            let wanted: HashSet<String> = queries
                .iter()
                .flat_map(|q| index.process_query(&q.text))
                .map(|t| t.surface)
                .filter(|w| index.word_vector(w).is_none())
                .collect();
            Some(load_embeddings(path, Some(&wanted))?)
        }
        None => None,
    };
    let mut searcher = Searcher::new(&index, qconfig)?;
    if let Some(table) = &extra {
        searcher = searcher.with_embeddings(table);
    }

    let mut entries = Vec::new();
    let mut empty = 0;
    for q in &queries {
        let list = searcher.search(q, system);
        empty += usize::from(list.is_empty());
        entries.extend(list.to_run_entries());
    }
    write_run(&entries, output)?;
    say!(
        out,
        "{} queries, {} results ({} queries with none), system {}, written to {}",
        queries.len(),
        entries.len(),
        empty,
        system.tag(),
        output.display()
    );
    Ok(())
}

pub fn evaluate(
    c: &RunConfig,
    run: &Path,
    cutoffs: &[usize],
    json: Option<&Path>,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let qrels = read_qrels(require(&c.qrels, "qrels")?)?;
    let report = evaluate_run(&read_run(run)?, &qrels, cutoffs)?;
    write!(out, "{}", report.to_table()).map_err(|e| CliError::io(format!("stdout: {e}")))?;
    if let Some(path) = json {
        let mut bytes = serde_json::to_vec_pretty(&report.to_json())
            .map_err(|e| CliError::io(format!("evaluate: serializing report: {e}")))?;
        bytes.push(b'\n');
        write_atomic(path, &bytes)?;
    }
    Ok(())
}

pub fn compare(c: &RunConfig, run_a: &Path, run_b: &Path, metric: &str, out: &mut impl Write) -> Result<(), CliError> {
    let metric: Metric = metric.parse().map_err(|e: semclust::Error| CliError::usage(e.to_string()))?;
    let qrels = read_qrels(require(&c.qrels, "qrels")?)?;
    let cutoffs: Vec<usize> = metric.cutoff().into_iter().collect();
    let a = evaluate_run(&read_run(run_a)?, &qrels, &cutoffs)?.series(metric)?;
    let b = evaluate_run(&read_run(run_b)?, &qrels, &cutoffs)?.series(metric)?;
    let r = paired_t_test_by_query(&a, &b)?;
    let mean = |s: &BTreeMap<String, f64>| s.values().sum::<f64>() / s.len() as f64;
    say!(out, "metric: {metric}");
    say!(out, "queries: {}", a.len());
    say!(out, "mean a: {:.4}", mean(&a));
    say!(out, "mean b: {:.4}", mean(&b));
    if r.no_difference {
        say!(out, "no difference: every per-query value is identical");
        return Ok(());
    }
    say!(out, "mean difference: {:.6}", r.mean_difference);
    say!(out, "t: {:.6}", r.t.unwrap_or(f64::NAN));
    say!(out, "df: {}", r.df);
    say!(out, "p (two-sided): {:.6}", r.p_value);
    Ok(())
}

pub fn reformulate(c: &RunConfig, output: &Path, out: &mut impl Write) -> Result<(), CliError> {
    let queries = read_queries(require(&c.queries, "queries")?)?;
    let lexicon = read_lexicon(require(&c.lexicon, "lexicon")?)?;
    let p = *require(&c.p, "p")?;
    let seed = c.seed.unwrap_or(0);
    let rewritten = reformulate_queries(&queries, &lexicon, p, seed)?;
    let changed = queries.iter().zip(&rewritten).filter(|(a, b)| a.text != b.text).count();
    write_queries(&rewritten, output)?;
    say!(out, "{changed} of {} queries changed (p {p}, seed {seed}), written to {}", queries.len(), output.display());
    Ok(())
}

pub fn cluster_stats(c: &RunConfig, out: &mut impl Write) -> Result<(), CliError> {
    let index = load_index(require(&c.index_dir, "index-dir")?)?;
    let manifest = manifest_of(&index);
    let clusters = index.clusters().clusters();
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    let (mut total, mut counted) = (0.0, 0usize);
    for cl in clusters {
        *histogram.entry(cl.words.len()).or_default() += 1;
        let Some(centroid) = &cl.centroid else { continue };
        // The founder sits on the centroid; only later members carry a distance.
        for w in cl.words.iter().skip(1) {
            if let Some(v) = index.word_vector(w) {
                total += cosine_distance(centroid, v)?;
                counted += 1;
            }
        }
    }
    let singletons = histogram.get(&1).copied().unwrap_or(0);
    let fraction = if clusters.is_empty() {
        0.0
    } else {
        singletons as f64 / clusters.len() as f64
    };
    say!(out, "clusters: {}", clusters.len());
    say!(out, "vocabulary: {}", manifest.vocabulary);
    say!(out, "epsilon: {}", manifest.epsilon);
    say!(out, "singleton fraction: {fraction:.4}");
    if counted > 0 {
        say!(out, "mean member-centroid distance: {:.6}", total / counted as f64);
    } else {
        say!(out, "mean member-centroid distance: n/a");
    }
    say!(out, "size histogram:");
    for (size, n) in &histogram {
        say!(out, "  {size}\t{n}");
    }
    Ok(())
}

pub fn estimate_epsilon(c: &RunConfig, out: &mut impl Write) -> Result<(), CliError> {
    let pairs = read_synonym_pairs(require(&c.synonym_pairs, "synonym-pairs")?)?;
    let wanted: HashSet<String> = pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    let table = load_embeddings(require(&c.embeddings, "embeddings")?, Some(&wanted))?;
    let epsilon = mean_pair_distance(&pairs, &table)?;
    say!(out, "epsilon: {epsilon}");
    say!(out, "pairs: {}", pairs.len());
    Ok(())
}
