use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::io::{Query, SynonymLexicon};

/// Replaces each word that has lexicon synonyms, independently with
/// probability `p`, by one of them chosen uniformly. Non-word characters,
/// unmapped words and query ids are left as they are. One seeded stream is
/// consumed across the queries in order, so the output depends only on the
/// inputs and `seed`.
pub fn reformulate_queries(queries: &[Query], lexicon: &SynonymLexicon, p: f64, seed: u64) -> Result<Vec<Query>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Validation(format!("replacement probability must lie in [0, 1], got {p}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(queries
        .iter()
        .map(|q| Query::new(q.id.clone(), rewrite(&q.text, lexicon, p, &mut rng)))
        .collect())
}

fn rewrite(text: &str, lexicon: &SynonymLexicon, p: f64, rng: &mut impl Rng) -> String {
    let mut out = String::with_capacity(text.len());
    let mut word_start = None;
    let mut emit = |word: &str, out: &mut String| match lexicon.synonyms(&word.to_lowercase()) {
        Some(syns) if rng.random_bool(p) => out.push_str(&syns[rng.random_range(0..syns.len())]),
        _ => out.push_str(word),
    };
    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() {
            word_start.get_or_insert(i);
            continue;
        }
        if let Some(s) = word_start.take() {
            emit(&text[s..i], &mut out);
        }
        out.push(c);
    }
    if let Some(s) = word_start {
        emit(&text[s..], &mut out);
    }
    out
}
