//! TREC run files: `qid Q0 docid rank score tag`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RunEntry {
    pub query_id: String,
    pub doc_id: String,
    pub rank: usize,
    pub score: f64,
    pub tag: String,
}

impl RunEntry {
    pub fn to_line(&self) -> String {
        format!(
            "{} Q0 {} {} {:.6} {}",
            self.query_id, self.doc_id, self.rank, self.score, self.tag
        )
    }
}

/// Checks that each query's ranks are exactly `1..=k` and that scores never
/// increase with rank.
pub fn validate_run(entries: &[RunEntry]) -> Result<()> {
    let mut per_query: HashMap<&str, Vec<&RunEntry>> = HashMap::new();
    for e in entries {
        if !e.score.is_finite() {
            return Err(Error::Validation(format!(
                "query {:?} doc {:?}: non-finite score",
                e.query_id, e.doc_id
            )));
        }
        for (what, field) in [("query id", &e.query_id), ("doc id", &e.doc_id), ("tag", &e.tag)] {
            if field.is_empty() || field.contains(char::is_whitespace) {
                return Err(Error::Validation(format!("{what} {field:?} is empty or has whitespace")));
            }
        }
        per_query.entry(&e.query_id).or_default().push(e);
    }
    for (query, mut list) in per_query {
        list.sort_by_key(|e| e.rank);
        for (i, e) in list.iter().enumerate() {
            if e.rank != i + 1 {
                return Err(Error::Validation(format!(
                    "query {query:?}: expected rank {}, found {}",
                    i + 1,
                    e.rank
                )));
            }
        }
        for pair in list.windows(2) {
            if pair[1].score > pair[0].score {
                return Err(Error::Validation(format!(
                    "query {query:?}: score increases from rank {} to rank {}",
                    pair[0].rank, pair[1].rank
                )));
            }
        }
    }
    Ok(())
}

/// Validates and writes entries in the order given, via a temp file and rename.
pub fn write_run(entries: &[RunEntry], path: &Path) -> Result<()> {
    validate_run(entries)?;
    let mut out = String::new();
    for e in entries {
        // Writing to a String cannot fail.
        let _ = writeln!(out, "{}", e.to_line());
    }
    super::write_atomic(path, out.as_bytes())
}

pub fn read_run(path: &Path) -> Result<Vec<RunEntry>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut entries = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 6 {
            return Err(Error::parse(path, lineno, "expected \"qid Q0 docid rank score tag\""));
        }
        let rank = fields[3]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("invalid rank {:?}", fields[3])))?;
        let score: f64 = fields[4]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("invalid score {:?}", fields[4])))?;
        if !score.is_finite() {
            return Err(Error::parse(path, lineno, "non-finite score"));
        }
        entries.push(RunEntry {
            query_id: fields[0].to_string(),
            doc_id: fields[2].to_string(),
            rank,
            score,
            tag: fields[5].to_string(),
        });
    }
    Ok(entries)
}
