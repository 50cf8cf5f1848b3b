use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{Qrels, RunEntry};

/// Ranked doc ids per query.
pub type Rankings = BTreeMap<String, Vec<String>>;

/// Groups run entries by query and orders each group by rank. Repeated
/// documents keep their best rank.
pub fn rankings_from_run(entries: &[RunEntry]) -> Rankings {
    let mut grouped: BTreeMap<String, Vec<&RunEntry>> = BTreeMap::new();
    for e in entries {
        grouped.entry(e.query_id.clone()).or_default().push(e);
    }
    grouped
        .into_iter()
        .map(|(q, mut list)| {
            list.sort_by(|a, b| a.rank.cmp(&b.rank).then_with(|| b.score.total_cmp(&a.score)));
            let mut seen = HashSet::new();
            let docs = list
                .into_iter()
                .filter(|e| seen.insert(e.doc_id.as_str()))
                .map(|e| e.doc_id.clone())
                .collect();
            (q, docs)
        })
        .collect()
}

fn relevant_in_top(ranking: &[String], qrels: &Qrels, query: &str, k: usize) -> usize {
    ranking.iter().take(k).filter(|d| qrels.is_relevant(query, d)).count()
}

/// `(P@k, R@k)`. Missing ranks count as non-relevant, so P@k always divides by `k`.
/// `None` when the query has no relevant documents.
pub fn precision_recall_at_k(ranking: &[String], qrels: &Qrels, query: &str, k: usize) -> Option<(f64, f64)> {
    let total = qrels.relevant_count(query);
    if total == 0 || k == 0 {
        return None;
    }
    let hits = relevant_in_top(ranking, qrels, query, k) as f64;
    Some((hits / k as f64, hits / total as f64))
}

pub fn average_precision(ranking: &[String], qrels: &Qrels, query: &str) -> Option<f64> {
    let total = qrels.relevant_count(query);
    if total == 0 {
        return None;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, d) in ranking.iter().enumerate() {
        if qrels.is_relevant(query, d) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    Some(sum / total as f64)
}

pub fn r_precision(ranking: &[String], qrels: &Qrels, query: &str) -> Option<f64> {
    let total = qrels.relevant_count(query);
    precision_recall_at_k(ranking, qrels, query, total).map(|(p, _)| p)
}

pub fn reciprocal_rank(ranking: &[String], qrels: &Qrels, query: &str) -> Option<f64> {
    if qrels.relevant_count(query) == 0 {
        return None;
    }
    Some(
        ranking
            .iter()
            .position(|d| qrels.is_relevant(query, d))
            .map_or(0.0, |i| 1.0 / (i + 1) as f64),
    )
}

fn evaluated_queries(qrels: &Qrels) -> Vec<&str> {
    qrels.queries().filter(|q| qrels.relevant_count(q) > 0).collect()
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Mean AP over queries with at least one relevant document. Queries absent
/// from `rankings` contribute 0.
pub fn map_over(rankings: &Rankings, qrels: &Qrels) -> f64 {
    mean(evaluated_queries(qrels).into_iter().map(|q| {
        let ranking = rankings.get(q).map_or(&[][..], Vec::as_slice);
        average_precision(ranking, qrels, q).unwrap_or(0.0)
    }))
}

pub fn mrr(rankings: &Rankings, qrels: &Qrels) -> f64 {
    mean(evaluated_queries(qrels).into_iter().map(|q| {
        let ranking = rankings.get(q).map_or(&[][..], Vec::as_slice);
        reciprocal_rank(ranking, qrels, q).unwrap_or(0.0)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryMetrics {
    pub ap: f64,
    pub r_prec: f64,
    pub rr: f64,
    pub precision: BTreeMap<usize, f64>,
    pub recall: BTreeMap<usize, f64>,
    pub relevant: usize,
    pub retrieved: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub per_query: BTreeMap<String, QueryMetrics>,
    pub map: f64,
    pub mean_r_prec: f64,
    pub mrr: f64,
    pub mean_precision: BTreeMap<usize, f64>,
    pub mean_recall: BTreeMap<usize, f64>,
    pub query_count: usize,
    /// Run queries with no relevant documents in the qrels.
    pub skipped: Vec<String>,
}

/// Full report. Every query with a relevant document is evaluated, scoring 0
/// when the run has nothing for it.
pub fn evaluate(rankings: &Rankings, qrels: &Qrels, ks: &[usize]) -> Result<MetricsReport> {
    if ks.contains(&0) {
        return Err(Error::Validation("cutoff k must be at least 1".into()));
    }
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();

    let mut per_query = BTreeMap::new();
    for q in evaluated_queries(qrels) {
        let ranking = rankings.get(q).map_or(&[][..], Vec::as_slice);
        let mut precision = BTreeMap::new();
        let mut recall = BTreeMap::new();
        for &k in &ks {
            let (p, r) = precision_recall_at_k(ranking, qrels, q, k).unwrap_or_default();
            precision.insert(k, p);
            recall.insert(k, r);
        }
        per_query.insert(
            q.to_string(),
            QueryMetrics {
                ap: average_precision(ranking, qrels, q).unwrap_or(0.0),
                r_prec: r_precision(ranking, qrels, q).unwrap_or(0.0),
                rr: reciprocal_rank(ranking, qrels, q).unwrap_or(0.0),
                precision,
                recall,
                relevant: qrels.relevant_count(q),
                retrieved: ranking.len(),
            },
        );
    }
    let skipped: Vec<String> = rankings
        .keys()
        .filter(|q| !per_query.contains_key(*q))
        .cloned()
        .collect();
    for q in &skipped {
        log::warn!("query {q:?} has no relevant documents in the qrels; skipped");
    }

    let avg = |f: &dyn Fn(&QueryMetrics) -> f64| mean(per_query.values().map(f));
    let mean_precision = ks.iter().map(|&k| (k, avg(&|m| m.precision[&k]))).collect();
    let mean_recall = ks.iter().map(|&k| (k, avg(&|m| m.recall[&k]))).collect();
    Ok(MetricsReport {
        map: avg(&|m| m.ap),
        mean_r_prec: avg(&|m| m.r_prec),
        mrr: avg(&|m| m.rr),
        mean_precision,
        mean_recall,
        query_count: per_query.len(),
        per_query,
        skipped,
    })
}

pub fn evaluate_run(entries: &[RunEntry], qrels: &Qrels, ks: &[usize]) -> Result<MetricsReport> {
    evaluate(&rankings_from_run(entries), qrels, ks)
}

/// A per-query column of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Ap,
    RPrec,
    Rr,
    Precision(usize),
    Recall(usize),
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let cutoff = |rest: &str| {
            rest.parse::<usize>()
                .ok()
                .filter(|&k| k > 0)
                .ok_or_else(|| Error::Config(format!("invalid cutoff in metric {s:?}")))
        };
        match lower.as_str() {
            "ap" | "map" => Ok(Metric::Ap),
            "rprec" | "r-prec" | "r_prec" => Ok(Metric::RPrec),
            "rr" | "mrr" => Ok(Metric::Rr),
            _ => {
                if let Some(rest) = lower.strip_prefix("p@") {
                    Ok(Metric::Precision(cutoff(rest)?))
                } else if let Some(rest) = lower.strip_prefix("r@") {
                    Ok(Metric::Recall(cutoff(rest)?))
                } else {
                    Err(Error::Config(format!(
                        "unknown metric {s:?}, expected ap, rprec, rr, p@k or r@k"
                    )))
                }
            }
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Metric::Ap => f.write_str("ap"),
            Metric::RPrec => f.write_str("rprec"),
            Metric::Rr => f.write_str("rr"),
            Metric::Precision(k) => write!(f, "p@{k}"),
            Metric::Recall(k) => write!(f, "r@{k}"),
        }
    }
}

impl Metric {
    pub fn cutoff(self) -> Option<usize> {
        match self {
            Metric::Precision(k) | Metric::Recall(k) => Some(k),
            _ => None,
        }
    }
}

impl MetricsReport {
    /// Per-query values of one metric, keyed by query id.
    pub fn series(&self, metric: Metric) -> Result<BTreeMap<String, f64>> {
        self.per_query
            .iter()
            .map(|(q, m)| {
                let v = match metric {
                    Metric::Ap => Some(m.ap),
                    Metric::RPrec => Some(m.r_prec),
                    Metric::Rr => Some(m.rr),
                    Metric::Precision(k) => m.precision.get(&k).copied(),
                    Metric::Recall(k) => m.recall.get(&k).copied(),
                };
                v.map(|v| (q.clone(), v))
                    .ok_or_else(|| Error::Config(format!("report has no cutoff for {metric:?}")))
            })
            .collect()
    }

    /// Aggregates keyed by metric name.
    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        obj.insert("map".into(), self.map.into());
        obj.insert("r_prec".into(), self.mean_r_prec.into());
        obj.insert("mrr".into(), self.mrr.into());
        for (k, v) in &self.mean_precision {
            obj.insert(format!("P@{k}"), (*v).into());
        }
        for (k, v) in &self.mean_recall {
            obj.insert(format!("R@{k}"), (*v).into());
        }
        obj.insert("queries".into(), self.query_count.into());
        obj.insert("skipped".into(), self.skipped.len().into());
        obj.insert(
            "per_query".into(),
            serde_json::to_value(&self.per_query).unwrap_or_default(),
        );
        serde_json::Value::Object(obj)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let mut row = |name: &str, value: f64| {
            let _ = writeln!(out, "{name:<10} {value:.4}");
        };
        row("MAP", self.map);
        row("R-Prec", self.mean_r_prec);
        row("MRR", self.mrr);
        for (k, v) in &self.mean_precision {
            row(&format!("P@{k}"), *v);
        }
        for (k, v) in &self.mean_recall {
            row(&format!("R@{k}"), *v);
        }
        let _ = writeln!(out, "{:<10} {}", "queries", self.query_count);
        let _ = writeln!(out, "{:<10} {}", "skipped", self.skipped.len());
        out
    }
}
