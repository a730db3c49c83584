//! Lightweight trainable quality scorer: a linear regressor over hashed word
//! n-grams, fit by full-batch gradient descent on the MSE against rescaled
//! [0,1] labels.
//!
//! Training is single-threaded and deterministic: examples are put into
//! canonical id order first, weights start at zero, and no randomness enters
//! beyond the hashing seed, so a fixed seed reproduces bit-identical weights
//! regardless of input order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binfmt;
use crate::corpus::CodeDocument;
use crate::error::{Error, Result};
use crate::features::{featurize, HashedNgramConfig, SparseVector};
use crate::quality::QualityLabel;

const MODEL_MAGIC: &[u8; 8] = b"CCQSCORE";

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScorerConfig {
    pub features: HashedNgramConfig,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for ScorerConfig {
    fn default() -> Self {
        ScorerConfig {
            features: HashedNgramConfig::new(1 << 20, 2, 0x5eed),
            epochs: 25,
            learning_rate: 0.5,
            seed: 0x5eed,
        }
    }
}

impl ScorerConfig {
    pub fn with_seed(seed: u64) -> Self {
        let base = ScorerConfig::default();
        ScorerConfig {
            features: HashedNgramConfig { seed, ..base.features },
            seed,
            ..base
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScorerModel {
    pub config: ScorerConfig,
    /// Dense weight vector, one entry per feature bucket.
    #[serde(skip)]
    pub weights: Vec<f64>,
    pub bias: f64,
    pub trained_epochs: usize,
    pub training_examples: usize,
}

impl ScorerModel {
    fn constant(config: ScorerConfig, value: f64, examples: usize) -> Self {
        ScorerModel {
            weights: vec![0.0; config.features.buckets],
            bias: value,
            trained_epochs: 0,
            training_examples: examples,
            config,
        }
    }

    /// Predicted quality in [0,1] (clamped).
    pub fn predict(&self, text: &str) -> f64 {
        let x = featurize(text, &self.config.features);
        self.predict_features(&x)
    }

    pub fn predict_features(&self, x: &SparseVector) -> f64 {
        (x.dot(&self.weights) + self.bias).clamp(0.0, 1.0)
    }

    /// Parallel scoring of a corpus; output order matches input order.
    pub fn predict_batch(&self, docs: &[CodeDocument]) -> Vec<f64> {
        docs.par_iter().map(|d| self.predict(&d.content)).collect()
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
            kind: "quality-scorer".into(),
            config: self.config,
            bias: self.bias,
            trained_epochs: self.trained_epochs,
            training_examples: self.training_examples,
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
        Ok(ScorerModel {
            config: header.config,
            weights,
            bias: header.bias,
            trained_epochs: header.trained_epochs,
            training_examples: header.training_examples,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SavedHeader {
    kind: String,
    config: ScorerConfig,
    bias: f64,
    trained_epochs: usize,
    training_examples: usize,
}

/// Training outcome: the model plus the post-epoch MSE trajectory.
pub struct TrainOutcome {
    pub model: ScorerModel,
    pub loss_per_epoch: Vec<f64>,
}

/// Fits the scorer on (document, label) pairs. Labels with no spread produce
/// a constant model (degenerate fit, warned) rather than an error.
pub fn train_scorer(
    labeled: &[(&CodeDocument, &QualityLabel)],
    config: &ScorerConfig,
) -> Result<TrainOutcome> {
    if labeled.is_empty() {
        return Err(Error::invalid("cannot train a scorer on an empty label set"));
    }
    // Canonical order makes full-batch training order-independent.
    let mut examples: Vec<(&CodeDocument, f64)> = labeled
        .iter()
        .map(|(doc, label)| (*doc, label.rescaled))
        .collect();
    examples.sort_by(|a, b| a.0.id.cmp(&b.0.id));

    let first = examples[0].1;
    if examples.iter().all(|(_, y)| *y == first) {
        log::warn!(
            "all {} labels equal {first}; returning a constant scorer",
            examples.len()
        );
        return Ok(TrainOutcome {
            model: ScorerModel::constant(*config, first, examples.len()),
            loss_per_epoch: vec![0.0],
        });
    }

    let features: Vec<SparseVector> = examples
        .iter()
        .map(|(doc, _)| featurize(&doc.content, &config.features))
        .collect();
    let targets: Vec<f64> = examples.iter().map(|(_, y)| *y).collect();
    let n = examples.len() as f64;

    let mut weights = vec![0.0f64; config.features.buckets];
    let mut bias = 0.0f64;
    let mut loss_per_epoch = Vec::with_capacity(config.epochs);

    for _ in 0..config.epochs {
        let mut grad_bias = 0.0;
        let mut grad: Vec<(u32, f64)> = Vec::new();
        for (x, &y) in features.iter().zip(&targets) {
            let err = x.dot(&weights) + bias - y;
            grad_bias += 2.0 * err / n;
            for &(i, v) in &x.0 {
                grad.push((i, 2.0 * err * v / n));
            }
        }
        for (i, g) in grad {
            weights[i as usize] -= config.learning_rate * g;
        }
        bias -= config.learning_rate * grad_bias;

        let mse = features
            .iter()
            .zip(&targets)
            .map(|(x, &y)| {
                let err = x.dot(&weights) + bias - y;
                err * err
            })
            .sum::<f64>()
            / n;
        loss_per_epoch.push(mse);
    }

    Ok(TrainOutcome {
        model: ScorerModel {
            config: *config,
            weights,
            bias,
            trained_epochs: config.epochs,
            training_examples: examples.len(),
        },
        loss_per_epoch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::DocId;

    fn small_config(seed: u64) -> ScorerConfig {
        ScorerConfig {
            features: HashedNgramConfig::new(1 << 14, 2, seed),
            epochs: 12,
            learning_rate: 0.5,
            seed,
        }
    }

    fn label(id: &str, raw: u8) -> QualityLabel {
        QualityLabel::new(DocId::new(id), raw, "test-oracle", None).unwrap()
    }

    /// 200 synthetic docs whose label tracks comment density.
    fn synthetic_corpus() -> Vec<(CodeDocument, QualityLabel)> {
        (0..200)
            .map(|i| {
                let comments = i % 11;
                let mut content = String::new();
                for c in 0..comments {
                    content.push_str(&format!("# helpful comment number {c}\n"));
                }
                for l in 0..(10 - comments.min(10)) {
                    content.push_str(&format!("x{l} = compute_{}({l})\n", i % 7));
                }
                let doc = CodeDocument::new(format!("syn-{i:03}", ), format!("s{i}.py"), content);
                let lbl = label(&format!("syn-{i:03}"), comments as u8);
                (doc, lbl)
            })
            .collect()
    }

    #[test]
    fn training_loss_decreases_monotonically() {
        let corpus = synthetic_corpus();
        let pairs: Vec<(&CodeDocument, &QualityLabel)> =
            corpus.iter().map(|(d, l)| (d, l)).collect();
        let outcome = train_scorer(&pairs, &small_config(1)).unwrap();
        let losses = &outcome.loss_per_epoch;
        for w in losses.windows(2) {
            assert!(w[1] < w[0], "loss must strictly decrease: {losses:?}");
        }
    }

    #[test]
    fn constant_labels_give_a_constant_model() {
        let docs: Vec<CodeDocument> = (0..5)
            .map(|i| CodeDocument::new(format!("c{i}"), format!("c{i}.py"), format!("v = {i}")))
            .collect();
        let labels: Vec<QualityLabel> = (0..5).map(|i| label(&format!("c{i}"), 5)).collect();
        let pairs: Vec<(&CodeDocument, &QualityLabel)> =
            docs.iter().zip(labels.iter()).collect();
        let outcome = train_scorer(&pairs, &small_config(2)).unwrap();
        for doc in &docs {
            assert!((outcome.model.predict(&doc.content) - 0.5).abs() < 1e-12);
        }
        assert!((outcome.model.predict("anything else at all") - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fixed_seed_reproduces_identical_weights_and_order_does_not_matter() {
        let corpus = synthetic_corpus();
        let pairs: Vec<(&CodeDocument, &QualityLabel)> =
            corpus.iter().map(|(d, l)| (d, l)).collect();
        let mut reversed = pairs.clone();
        reversed.reverse();

        let a = train_scorer(&pairs, &small_config(7)).unwrap().model;
        let b = train_scorer(&pairs, &small_config(7)).unwrap().model;
        let c = train_scorer(&reversed, &small_config(7)).unwrap().model;
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.bias, b.bias);
        assert_eq!(a.weights, c.weights, "training must be order-invariant");
        assert_eq!(a.bias, c.bias);
    }

    #[test]
    fn empty_training_set_is_an_error() {
        assert!(train_scorer(&[], &small_config(0)).is_err());
    }

    #[test]
    fn save_load_round_trip_preserves_predictions() {
        let corpus = synthetic_corpus();
        let pairs: Vec<(&CodeDocument, &QualityLabel)> =
            corpus.iter().map(|(d, l)| (d, l)).collect();
        let model = train_scorer(&pairs, &small_config(3)).unwrap().model;

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scorer.bin");
        model.save(&path).unwrap();
        let loaded = ScorerModel::load(&path).unwrap();
        for (doc, _) in corpus.iter().take(10) {
            assert_eq!(model.predict(&doc.content), loaded.predict(&doc.content));
        }
    }

    #[test]
    fn predictions_are_clamped_to_unit_interval() {
        let corpus = synthetic_corpus();
        let pairs: Vec<(&CodeDocument, &QualityLabel)> =
            corpus.iter().map(|(d, l)| (d, l)).collect();
        let model = train_scorer(&pairs, &small_config(4)).unwrap().model;
        for (doc, _) in &corpus {
            let p = model.predict(&doc.content);
            assert!((0.0..=1.0).contains(&p));
        }
    }
}
