//! Hashed n-gram linear text classifier with iterative hard-negative
//! training, used for code-related web recall and high-quality data recall.
//!
//! The classifier is a logistic regression over hashed unigrams+bigrams,
//! trained full-batch with a linearly decaying learning rate. The decision
//! score is the raw margin (w·x + b), so swapping the positive and negative
//! pools exactly negates every score.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binfmt;
use crate::corpus::{CodeDocument, DocId};
use crate::error::{Error, Result};
use crate::features::{featurize, HashedNgramConfig, SparseVector};

const MODEL_MAGIC: &[u8; 8] = b"CCRECALL";

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RecallConfig {
    pub features: HashedNgramConfig,
    pub epochs: usize,
    /// Initial learning rate; decays linearly to zero over the epochs.
    pub learning_rate: f64,
    pub seed: u64,
    /// Margin threshold above which a document counts as recalled.
    pub recall_threshold: f64,
    /// Quality score below which a recalled document is a hard negative.
    pub low_quality_cutoff: f64,
    /// Quantile of current positive-pool scores a candidate must reach to be
    /// promoted into the positive pool.
    pub promotion_quantile: f64,
}

impl Default for RecallConfig {
    fn default() -> Self {
        RecallConfig {
            features: HashedNgramConfig::new(1 << 21, 2, 0xfa57),
            epochs: 5,
            learning_rate: 2.0,
            seed: 0xfa57,
            recall_threshold: 0.0,
            low_quality_cutoff: 0.3,
            promotion_quantile: 0.95,
        }
    }
}

/// The three training pools; pairwise disjoint by construction.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TrainingPools {
    pub positives: BTreeSet<DocId>,
    pub random_negatives: BTreeSet<DocId>,
    pub hard_negatives: BTreeSet<DocId>,
}

impl TrainingPools {
    pub fn new(
        positives: impl IntoIterator<Item = DocId>,
        random_negatives: impl IntoIterator<Item = DocId>,
        hard_negatives: impl IntoIterator<Item = DocId>,
    ) -> Result<Self> {
        let pools = TrainingPools {
            positives: positives.into_iter().collect(),
            random_negatives: random_negatives.into_iter().collect(),
            hard_negatives: hard_negatives.into_iter().collect(),
        };
        pools.validate()?;
        Ok(pools)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.positives.is_disjoint(&self.random_negatives)
            || !self.positives.is_disjoint(&self.hard_negatives)
            || !self.random_negatives.is_disjoint(&self.hard_negatives)
        {
            return Err(Error::config("training pools must be pairwise disjoint"));
        }
        Ok(())
    }

    pub fn contains(&self, id: &DocId) -> bool {
        self.positives.contains(id)
            || self.random_negatives.contains(id)
            || self.hard_negatives.contains(id)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecallModel {
    pub config: RecallConfig,
    #[serde(skip)]
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Training-round number; 1 for a single round.
    pub round: u32,
    /// Where the seed pools came from, for audit.
    pub provenance: Vec<String>,
}

impl RecallModel {
    /// Raw decision margin; finite for any document.
    pub fn score(&self, text: &str) -> f64 {
        let x = featurize(text, &self.config.features);
        x.dot(&self.weights) + self.bias
    }

    /// Margin squashed to a probability.
    pub fn probability(&self, text: &str) -> f64 {
        sigmoid(self.score(text))
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let sparse: Vec<(u32, f64)> = self
            .weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(i, w)| (i as u32, *w))
            .collect();
        let header = SavedHeader {
            kind: "recall-classifier".into(),
            config: self.config,
            bias: self.bias,
            round: self.round,
            provenance: self.provenance.clone(),
        };
        binfmt::write_container(path, MODEL_MAGIC, &header, &binfmt::encode_sparse_weights(&sparse))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let container: binfmt::Container<SavedHeader> = binfmt::read_container(path, MODEL_MAGIC)?;
        let header = container.header;
        let mut weights = vec![0.0; header.config.features.buckets];
        for (i, w) in binfmt::decode_sparse_weights(&container.payload, path)? {
            weights[i as usize] = w;
        }
        Ok(RecallModel {
            config: header.config,
            weights,
            bias: header.bias,
            round: header.round,
            provenance: header.provenance,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SavedHeader {
    kind: String,
    config: RecallConfig,
    bias: f64,
    round: u32,
    provenance: Vec<String>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Resolves pool ids against a document store.
fn resolve<'a>(
    ids: &BTreeSet<DocId>,
    store: &'a BTreeMap<DocId, &'a CodeDocument>,
    pool_name: &str,
) -> Result<Vec<&'a CodeDocument>> {
    ids.iter()
        .map(|id| {
            store.get(id).copied().ok_or_else(|| {
                Error::config(format!("{pool_name} pool references unknown document {id}"))
            })
        })
        .collect()
}

/// Trains a single-round recall model on the pools. `hard_negatives` may be
/// empty (round 1); the other pools must not be.
pub fn train_recall(
    pools: &TrainingPools,
    docs: &[CodeDocument],
    config: &RecallConfig,
) -> Result<RecallModel> {
    pools.validate()?;
    if pools.positives.is_empty() {
        return Err(Error::config("positive pool is empty"));
    }
    if pools.random_negatives.is_empty() {
        return Err(Error::config("random-negative pool is empty"));
    }
    let store: BTreeMap<DocId, &CodeDocument> =
        docs.iter().map(|d| (d.id.clone(), d)).collect();

    // Canonical id order keeps training order-independent.
    let mut examples: Vec<(&CodeDocument, f64)> = Vec::new();
    for doc in resolve(&pools.positives, &store, "positive")? {
        examples.push((doc, 1.0));
    }
    for doc in resolve(&pools.random_negatives, &store, "random-negative")? {
        examples.push((doc, 0.0));
    }
    for doc in resolve(&pools.hard_negatives, &store, "hard-negative")? {
        examples.push((doc, 0.0));
    }
    examples.sort_by(|a, b| a.0.id.cmp(&b.0.id));

    let features: Vec<SparseVector> = examples
        .iter()
        .map(|(doc, _)| featurize(&doc.content, &config.features))
        .collect();
    let n = examples.len() as f64;

    let mut weights = vec![0.0f64; config.features.buckets];
    let mut bias = 0.0f64;
    for epoch in 0..config.epochs {
        let lr = config.learning_rate * (1.0 - epoch as f64 / config.epochs as f64);
        let mut grad_bias = 0.0;
        let mut grad: Vec<(u32, f64)> = Vec::new();
        for (x, (_, y)) in features.iter().zip(&examples) {
            let p = sigmoid(x.dot(&weights) + bias);
            let err = p - y;
            grad_bias += err / n;
            for &(i, v) in &x.0 {
                grad.push((i, err * v / n));
            }
        }
        for (i, g) in grad {
            weights[i as usize] -= lr * g;
        }
        bias -= lr * grad_bias;
    }

    Ok(RecallModel {
        config: *config,
        weights,
        bias,
        round: 1,
        provenance: vec![format!(
            "pools: {} positive, {} random-negative, {} hard-negative",
            pools.positives.len(),
            pools.random_negatives.len(),
            pools.hard_negatives.len()
        )],
    })
}

/// Applies the model: recalled = documents whose margin reaches `threshold`.
/// Scores for every document are returned for audit.
pub fn apply_recall(
    model: &RecallModel,
    docs: &[CodeDocument],
    threshold: f64,
) -> (BTreeSet<DocId>, Vec<(DocId, f64)>) {
    let scores: Vec<(DocId, f64)> = docs
        .par_iter()
        .map(|d| (d.id.clone(), model.score(&d.content)))
        .collect();
    let recalled = scores
        .iter()
        .filter(|(_, s)| *s >= threshold)
        .map(|(id, _)| id.clone())
        .collect();
    (recalled, scores)
}

/// Hard negatives: candidates the model recalls whose quality score falls
/// below the low-quality cutoff.
pub fn mine_hard_negatives(
    model: &RecallModel,
    candidates: &[CodeDocument],
    quality_scores: &BTreeMap<DocId, f64>,
    config: &RecallConfig,
) -> BTreeSet<DocId> {
    let (recalled, _) = apply_recall(model, candidates, config.recall_threshold);
    recalled
        .into_iter()
        .filter(|id| {
            quality_scores
                .get(id)
                .map(|q| *q < config.low_quality_cutoff)
                .unwrap_or(false)
        })
        .collect()
}

/// Outcome of the iterative loop.
pub struct IterateOutcome {
    pub model: RecallModel,
    pub pools: TrainingPools,
    /// (promoted, mined) counts per completed round.
    pub rounds: Vec<(usize, usize)>,
}

/// Iterative training: each round trains, applies the model to the unlabeled
/// pool, promotes confident positives, mines hard negatives, and retrains.
/// A round that promotes nothing ends the loop early.
pub fn iterate_rounds(
    pools: &TrainingPools,
    docs: &[CodeDocument],
    unlabeled: &[CodeDocument],
    quality_scores: &BTreeMap<DocId, f64>,
    rounds: u32,
    config: &RecallConfig,
) -> Result<IterateOutcome> {
    if !(2..=3).contains(&rounds) {
        return Err(Error::config(format!("rounds must be 2 or 3, got {rounds}")));
    }
    let mut pools = pools.clone();
    let mut all_docs: Vec<CodeDocument> = docs.to_vec();
    let known: BTreeSet<DocId> = all_docs.iter().map(|d| d.id.clone()).collect();
    for doc in unlabeled {
        if !known.contains(&doc.id) {
            all_docs.push(doc.clone());
        }
    }

    let mut model = train_recall(&pools, &all_docs, config)?;
    let mut round_log = Vec::new();

    for round in 2..=rounds {
        let candidates: Vec<CodeDocument> = unlabeled
            .iter()
            .filter(|d| !pools.contains(&d.id))
            .cloned()
            .collect();
        if candidates.is_empty() {
            log::info!("round {round}: no unlabeled candidates left; stopping early");
            break;
        }

        // Mining runs first; a low-quality candidate can never be promoted.
        let mined = mine_hard_negatives(&model, &candidates, quality_scores, config);

        let positive_docs: Vec<&CodeDocument> = all_docs
            .iter()
            .filter(|d| pools.positives.contains(&d.id))
            .collect();
        let mut positive_scores: Vec<f64> =
            positive_docs.iter().map(|d| model.score(&d.content)).collect();
        positive_scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let bar = quantile(&positive_scores, config.promotion_quantile);

        let promoted: BTreeSet<DocId> = candidates
            .iter()
            .filter(|d| !mined.contains(&d.id) && model.score(&d.content) >= bar)
            .map(|d| d.id.clone())
            .collect();

        pools.hard_negatives.extend(mined.iter().cloned());
        pools.positives.extend(promoted.iter().cloned());
        pools.validate()?;
        round_log.push((promoted.len(), mined.len()));

        if promoted.is_empty() {
            log::info!("round {round}: promoted zero new positives; stopping early");
            break;
        }

        model = train_recall(&pools, &all_docs, config)?;
        model.round = round;
        model
            .provenance
            .push(format!("round {round}: +{} positives, +{} hard negatives", promoted.len(), mined.len()));
    }

    Ok(IterateOutcome { model, pools, rounds: round_log })
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::INFINITY;
    }
    let idx = ((sorted.len() as f64 - 1.0) * q).round() as usize;
    sorted[idx.min(sorted.len() - 1)]
}
