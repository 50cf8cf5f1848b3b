//! Synthetic collections for integration tests.
//!
//! Concepts are random unit directions. Each concept has a head word whose
//! vector is exactly the direction and two variants offset orthogonally by
//! `SPREAD`, so head-to-variant distances are identical and smaller than the
//! mean over all synonym pairs. Documents are written with head words only;
//! the lexicon maps heads to their variants.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semclust::io::SynonymLexicon;
use semclust::{Document, EmbeddingTable, Qrels, Query};

pub const DIM: usize = 32;
pub const SPREAD: f64 = 0.3;

pub struct Collection {
    pub table: EmbeddingTable,
    pub corpus: Vec<Document>,
    pub queries: Vec<Query>,
    pub qrels: Qrels,
    pub lexicon: SynonymLexicon,
    pub pairs: Vec<(String, String)>,
}

pub fn unit(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Unit vector orthogonal to `base` (assumed unit length).
pub fn orthogonal_unit(rng: &mut impl Rng, base: &[f64]) -> Vec<f64> {
    loop {
        let mut v = unit(rng, base.len());
        let proj: f64 = v.iter().zip(base).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(base).for_each(|(a, b)| *a -= proj * b);
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

pub fn head(c: usize) -> String {
    format!("c{c}h")
}

pub fn variant(c: usize, j: usize) -> String {
    format!("c{c}v{j}")
}

pub fn filler(i: usize) -> String {
    format!("f{i}x")
}

/// `docs` documents over `concepts` concepts, each document mentioning
/// `per_doc` distinct concepts plus a few filler words. Query `q{i}` asks for
/// three of document `d{i}`'s concepts and only `d{i}` is relevant. Only
/// concepts with an even index are in the lexicon.
pub fn synonym_collection(seed: u64, docs: usize, concepts: usize, per_doc: usize) -> Collection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = EmbeddingTable::new(DIM);
    let mut pairs = Vec::new();
    let mut lexicon = BTreeMap::new();
    for c in 0..concepts {
        let base = unit(&mut rng, DIM);
        table.insert(head(c), base.clone()).unwrap();
        for j in 0..2 {
            let off = orthogonal_unit(&mut rng, &base);
            let v: Vec<f64> = base.iter().zip(&off).map(|(b, o)| b + SPREAD * o).collect();
            table.insert(variant(c, j), v).unwrap();
        }
        pairs.push((head(c), variant(c, 0)));
        pairs.push((head(c), variant(c, 1)));
        pairs.push((variant(c, 0), variant(c, 1)));
        if c % 2 == 0 {
            lexicon.insert(head(c), vec![variant(c, 0), variant(c, 1)]);
        }
    }
    let fillers = 40;
    for i in 0..fillers {
        table.insert(filler(i), unit(&mut rng, DIM)).unwrap();
    }

    let mut corpus = Vec::new();
    let mut queries = Vec::new();
    let mut qrels = Qrels::new();
    for d in 0..docs {
        let mut picked: Vec<usize> = Vec::new();
        while picked.len() < per_doc {
            let c = rng.random_range(0..concepts);
            if !picked.contains(&c) {
                picked.push(c);
            }
        }
        let mut words = Vec::new();
        for (i, &c) in picked.iter().enumerate() {
            for _ in 0..(1 + (i + d) % 2) {
                words.push(head(c));
            }
        }
        for _ in 0..rng.random_range(2..6) {
            words.push(filler(rng.random_range(0..fillers)));
        }
        let id = format!("d{d:03}");
        corpus.push(Document::new(id.clone(), words.join(" ")));
        let q: Vec<String> = picked.iter().take(3).map(|&c| head(c)).collect();
        let qid = format!("q{d:03}");
        queries.push(Query::new(qid.clone(), q.join(" ")));
        qrels.insert(qid, id, 1);
    }
    Collection {
        table,
        corpus,
        queries,
        qrels,
        lexicon: SynonymLexicon::new(lexicon).unwrap(),
        pairs,
    }
}
