use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use crate::CliError;

/// Paths and parameters shared by the subcommands. Every field can be given
/// as a flag or in the TOML config file; flags win.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    /// Word vectors in text format ("count dim" header, then "word x1 ... xd").
    #[arg(long, global = true)]
    pub embeddings: Option<PathBuf>,
    /// Corpus, JSON Lines with "id" and "text".
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Queries, "id<TAB>text" per line.
    #[arg(long, global = true)]
    pub queries: Option<PathBuf>,
    /// TREC qrels.
    #[arg(long, global = true)]
    pub qrels: Option<PathBuf>,
    #[arg(long, global = true)]
    pub stopwords: Option<PathBuf>,
    /// Named-entity word list.
    #[arg(long, global = true)]
    pub gazetteer: Option<PathBuf>,
    /// JSON synonym lexicon used by reformulate.
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,
    /// "word1<TAB>word2" pairs used to estimate epsilon.
    #[arg(long, global = true)]
    pub synonym_pairs: Option<PathBuf>,
    #[arg(long, global = true)]
    pub index_dir: Option<PathBuf>,

    /// Clustering threshold; overrides the estimate when building.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true)]
    pub k1: Option<f64>,
    #[arg(long, global = true)]
    pub b: Option<f64>,
    /// Results per query.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Depth of each list entering fusion.
    #[arg(long = "fusion-n", global = true)]
    pub fusion_n: Option<usize>,
    #[arg(long, global = true)]
    pub rw_threshold: Option<u64>,
    /// Replacement probability for reformulate.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// semantic, bm25, combined or avg-baseline.
    #[arg(long, global = true)]
    pub system: Option<String>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),+) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )+
    };
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let raw = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("config: {}: {e}", path.display())))?;
        let mut config: RunConfig =
            toml::from_str(&raw).map_err(|e| CliError::parse(format!("config: {}: {e}", path.display())))?;
        // Relative paths in the file are taken from the file's directory.
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut config.embeddings,
            &mut config.corpus,
            &mut config.queries,
            &mut config.qrels,
            &mut config.stopwords,
            &mut config.gazetteer,
            &mut config.lexicon,
            &mut config.synonym_pairs,
            &mut config.index_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overlaid(mut self, flags: &RunConfig) -> Self {
        let flags = flags.clone();
        overlay!(self, flags; embeddings, corpus, queries, qrels, stopwords, gazetteer, lexicon,
            synonym_pairs, index_dir, epsilon, gamma, k1, b, k, fusion_n, rw_threshold, p, seed, system);
        self
    }
}

/// Fetches a required setting or reports which flag is missing.
pub fn require<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T, CliError> {
    value
        .as_ref()
        .ok_or_else(|| CliError::usage(format!("missing --{flag} (flag or config file)")))
}
