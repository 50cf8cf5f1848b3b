//! Semantic retrieval over word clusters.
//!
//! Vocabulary words are grouped into clusters with frozen centroids taken from
//! pretrained embeddings. Documents and queries become sparse vectors over those
//! clusters and are matched by cosine, and the result is fused with BM25. The
//! crate also carries the evaluation tooling used to compare the systems.

pub mod cluster;
pub mod error;
pub mod eval;
pub mod index;
pub mod io;
pub mod query;
pub mod text;

pub use cluster::{Cluster, ClusterConfig, ClusterSet};
pub use error::{Error, Result};
pub use index::{build_index, Index, IndexConfig};
pub use io::{Document, EmbeddingTable, Qrels, Query, RunEntry};
pub use query::{QueryConfig, ScoredList, Searcher, System};
