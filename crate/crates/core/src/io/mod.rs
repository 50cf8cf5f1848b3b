//! File formats: embeddings, corpora, queries, qrels, lexicons, run files and
//! the on-disk index layout.

mod embeddings;
mod persist;
mod records;
mod run;

use std::path::Path;

pub use embeddings::{load_embeddings, write_embeddings, EmbeddingTable};
pub use persist::{load_index, manifest_of, read_manifest, save_index, Manifest, FORMAT_VERSION};
pub use records::{
    read_corpus, read_lexicon, read_qrels, read_queries, read_synonym_pairs, read_word_list,
    write_queries, AnnotatedToken, Document, Qrels, Query, SynonymLexicon,
};
pub use run::{read_run, validate_run, write_run, RunEntry};

use crate::error::{Error, Result};

/// Writes `bytes` to a sibling temp file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Validation(format!("{} has no file name", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
