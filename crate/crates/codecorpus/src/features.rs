//! Hashed word n-gram features shared by the quality scorer and the recall
//! classifier.
//!
//! Text is lowercased and whitespace-split; n-grams up to the configured
//! order are hashed into a fixed number of buckets and the resulting sparse
//! count vector is L2-normalized. Everything is deterministic given the
//! hashing seed.

use serde::{Deserialize, Serialize};

use crate::hashing::hash64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HashedNgramConfig {
    /// Number of feature buckets (a power of two keeps masking cheap but any
    /// positive count works).
    pub buckets: usize,
    /// Highest n-gram order; 2 means unigrams + bigrams.
    pub max_order: usize,
    pub seed: u64,
}

impl HashedNgramConfig {
    pub fn new(buckets: usize, max_order: usize, seed: u64) -> Self {
        HashedNgramConfig { buckets, max_order, seed }
    }
}

/// Sparse L2-normalized feature vector: sorted (bucket, weight) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector(pub Vec<(u32, f64)>);

impl SparseVector {
    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.0.iter().map(|&(i, v)| v * dense[i as usize]).sum()
    }
}

/// Extracts the hashed n-gram feature vector of one text.
pub fn featurize(text: &str, config: &HashedNgramConfig) -> SparseVector {
    let tokens: Vec<String> = text.split_whitespace().map(|t| t.to_lowercase()).collect();
    let mut counts: std::collections::BTreeMap<u32, f64> = std::collections::BTreeMap::new();
    for order in 1..=config.max_order {
        if tokens.len() < order {
            break;
        }
        for window in tokens.windows(order) {
            let gram = window.join("\u{1f}");
            let bucket = (hash64(gram.as_bytes(), config.seed) % config.buckets as u64) as u32;
            *counts.entry(bucket).or_insert(0.0) += 1.0;
        }
    }
    let norm: f64 = counts.values().map(|v| v * v).sum::<f64>().sqrt();
    let pairs = if norm > 0.0 {
        counts.into_iter().map(|(i, v)| (i, v / norm)).collect()
    } else {
        Vec::new()
    };
    SparseVector(pairs)
}
