//! MinHash signatures over word shingles.
//!
//! Shingles are word w-grams of whitespace-split, lowercased tokens. Each of
//! the k signature positions applies an independent linear permutation over a
//! 61-bit prime field to the shingle hashes and keeps the minimum, so the
//! expected fraction of matching positions between two signatures equals the
//! Jaccard similarity of the underlying shingle sets.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CodeDocument, DocId};
use crate::error::{Error, Result};
use crate::hashing::hash64;

/// Mersenne prime 2^61 - 1; the permutation field.
const PRIME: u64 = (1 << 61) - 1;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MinHashConfig {
    /// Signature length.
    pub k: usize,
    /// Shingle width in words.
    pub shingle_w: usize,
    /// Seed for the permutation family and shingle hashing.
    pub seed: u64,
}

impl Default for MinHashConfig {
    fn default() -> Self {
        MinHashConfig {
            k: 256,
            shingle_w: 5,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinHashSignature {
    pub doc_id: DocId,
    pub values: Vec<u64>,
}

/// Hashed shingle set of a document. Documents with fewer than `w` words
/// contribute their whole token sequence as a single shingle.
pub fn shingle_set(content: &str, w: usize, seed: u64) -> HashSet<u64> {
    let tokens: Vec<String> = content
        .split_whitespace()
        .map(|t| t.to_lowercase())
        .collect();
    let mut set = HashSet::new();
    if tokens.len() < w {
        set.insert(hash64(tokens.join("\u{1f}").as_bytes(), seed));
        return set;
    }
    for window in tokens.windows(w) {
        set.insert(hash64(window.join("\u{1f}").as_bytes(), seed));
    }
    set
}

/// Precomputed signer for one (k, shingle_w, seed) configuration.
pub struct Signer {
    pub config: MinHashConfig,
    perms: Vec<(u64, u64)>,
}

impl Signer {
    pub fn new(config: MinHashConfig) -> Result<Self> {
        if config.k < 16 {
            return Err(Error::config(format!("minhash k must be >= 16, got {}", config.k)));
        }
        if config.shingle_w < 1 {
            return Err(Error::config("shingle width must be >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let perms = (0..config.k)
            .map(|_| (rng.gen_range(1..PRIME), rng.gen_range(0..PRIME)))
            .collect();
        Ok(Signer { config, perms })
    }

    /// Signature of a single document.
    pub fn sign(&self, doc: &CodeDocument) -> MinHashSignature {
        self.sign_content(doc.id.clone(), &doc.content)
    }

    pub fn sign_content(&self, doc_id: DocId, content: &str) -> MinHashSignature {
        let shingles = shingle_set(content, self.config.shingle_w, self.config.seed);
        self.sign_shingles(doc_id, &shingles)
    }

    /// Signature over the union of several documents' shingles; used for
    /// repository-level dedup.
    pub fn sign_union<'a>(
        &self,
        doc_id: DocId,
        contents: impl IntoIterator<Item = &'a str>,
    ) -> MinHashSignature {
        let mut shingles = HashSet::new();
        for content in contents {
            shingles.extend(shingle_set(content, self.config.shingle_w, self.config.seed));
        }
        self.sign_shingles(doc_id, &shingles)
    }

    fn sign_shingles(&self, doc_id: DocId, shingles: &HashSet<u64>) -> MinHashSignature {
        let values = self
            .perms
            .iter()
            .map(|&(a, b)| {
                shingles
                    .iter()
                    .map(|&s| permute(s, a, b))
                    .min()
                    .unwrap_or(u64::MAX)
            })
            .collect();
        MinHashSignature { doc_id, values }
    }

    /// Parallel batch signing; output order matches input order.
    pub fn sign_batch(&self, docs: &[CodeDocument]) -> Vec<MinHashSignature> {
        docs.par_iter().map(|d| self.sign(d)).collect()
    }
}

#[inline]
fn permute(x: u64, a: u64, b: u64) -> u64 {
    let v = (u128::from(x % PRIME) * u128::from(a) + u128::from(b)) % u128::from(PRIME);
    v as u64
}

/// Fraction of matching positions; the MinHash estimate of Jaccard
/// similarity. Errors on signatures of different length.
pub fn estimate_jaccard(a: &MinHashSignature, b: &MinHashSignature) -> Result<f64> {
    if a.values.len() != b.values.len() {
        return Err(Error::config(format!(
            "signature length mismatch: {} vs {}",
            a.values.len(),
            b.values.len()
        )));
    }
    let matches = a
        .values
        .iter()
        .zip(&b.values)
        .filter(|(x, y)| x == y)
        .count();
    Ok(matches as f64 / a.values.len() as f64)
}
