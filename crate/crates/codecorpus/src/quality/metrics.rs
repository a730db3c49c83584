//! Scorer evaluation metrics: class-averaged and overall mean absolute error.
//!
//! With C_i the test samples whose ground-truth score is i and ŷ_j the
//! prediction for sample j expressed on the 0..10 scale:
//!
//! ```text
//! eps_cmae = (1/11) Σ_{i=0..10} ( (1/|C_i|) Σ_{j in C_i} |ŷ_j - i| )
//! eps_mae  = ( Σ_{i=0..10} Σ_{j in C_i} |ŷ_j - i| ) / ( Σ_{i=0..10} |C_i| )
//! ```
//!
//! Classes with |C_i| = 0 are skipped and the 1/11 divisor becomes one over
//! the number of non-empty classes.

use serde::{Deserialize, Serialize};

use crate::corpus::{CodeDocument, DocId};
use crate::error::{Error, Result};
use crate::quality::{QualityLabel, ScorerModel};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    /// |C_i| for i = 0..=10.
    pub class_counts: [usize; 11],
    /// (doc id, ground-truth class, prediction on the 0..10 scale).
    pub predictions: Vec<(DocId, u8, f64)>,
    pub eps_cmae: f64,
    pub eps_mae: f64,
}

/// Computes both metrics from (id, class, prediction-on-0..10) triples.
pub fn eval_from_predictions(samples: &[(DocId, u8, f64)]) -> Result<EvalReport> {
    if samples.is_empty() {
        return Err(Error::invalid("cannot evaluate on an empty test set"));
    }
    let mut class_counts = [0usize; 11];
    let mut class_abs = [0.0f64; 11];
    for (id, class, pred) in samples {
        if *class > 10 {
            return Err(Error::invalid(format!(
                "document {id}: ground-truth class {class} outside 0..=10"
            )));
        }
        class_counts[*class as usize] += 1;
        class_abs[*class as usize] += (pred - f64::from(*class)).abs();
    }

    let mut nonempty = 0usize;
    let mut class_mean_sum = 0.0;
    let mut total_abs = 0.0;
    for i in 0..11 {
        total_abs += class_abs[i];
        if class_counts[i] > 0 {
            nonempty += 1;
            class_mean_sum += class_abs[i] / class_counts[i] as f64;
        }
    }
    Ok(EvalReport {
        class_counts,
        predictions: samples.to_vec(),
        eps_cmae: class_mean_sum / nonempty as f64,
        eps_mae: total_abs / samples.len() as f64,
    })
}

/// Runs the model over a labeled test set. Model predictions live in [0,1]
/// and are scaled by 10 before entering the formulas.
pub fn evaluate_scorer(
    model: &ScorerModel,
    test: &[(&CodeDocument, &QualityLabel)],
) -> Result<EvalReport> {
    let samples: Vec<(DocId, u8, f64)> = test
        .iter()
        .map(|(doc, label)| {
            (
                doc.id.clone(),
                label.raw_score,
                model.predict(&doc.content) * 10.0,
            )
        })
        .collect();
    eval_from_predictions(&samples)
}
