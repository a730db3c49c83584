//! LLM-based quality scoring: prompt construction, oracle querying, rating
//! extraction, a lightweight trainable scorer, percentile filtering, and
//! scorer evaluation metrics.

pub mod metrics;
pub mod oracle;
pub mod percentile;
pub mod prompt;
pub mod rating;
pub mod sampling;
pub mod scorer;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CodeDocument, DocId};
use crate::error::{Error, Result};

pub use metrics::{eval_from_predictions, evaluate_scorer, EvalReport};
pub use oracle::{
    query_oracle, CompletionClient, FileMockClient, HttpCompletionClient, HttpOracleConfig,
    MockClient, MockOutcome, OracleError, OracleResponse, RateLimiter, RetryPolicy,
};
pub use percentile::percentile_filter;
pub use prompt::{build_quality_prompt, QUALITY_PROMPT_TEMPLATE};
pub use rating::extract_rating;
pub use sampling::{allocate_sample, stratified_sample, LABELING_PLAN};
pub use scorer::{train_scorer, ScorerConfig, ScorerModel, TrainOutcome};

/// Tag under which quality scores are attached to documents.
pub const QUALITY_TAG: &str = "quality";

/// An oracle score for one document: the raw 0..10 rating and its [0,1]
/// rescaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityLabel {
    pub doc_id: DocId,
    pub raw_score: u8,
    pub rescaled: f64,
    pub oracle_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explanation: Option<String>,
}

impl QualityLabel {
    pub fn new(
        doc_id: DocId,
        raw_score: u8,
        oracle_name: impl Into<String>,
        explanation: Option<String>,
    ) -> Result<Self> {
        if raw_score > 10 {
            return Err(Error::RatingOutOfRange(i64::from(raw_score)));
        }
        Ok(QualityLabel {
            doc_id,
            raw_score,
            rescaled: f64::from(raw_score) / 10.0,
            oracle_name: oracle_name.into(),
            explanation,
        })
    }
}

/// Per-document outcome of a labeling run; failures are recorded and the
/// batch continues.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelOutcome {
    pub doc_id: DocId,
    pub label: Option<QualityLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub retries: u32,
}

#[derive(Clone, Default)]
pub struct LabelingOptions {
    pub retry: RetryPolicy,
    /// Global request budget; `None` means unpaced.
    pub requests_per_sec: Option<f64>,
    /// Keep the oracle explanation text alongside the score.
    pub keep_explanations: bool,
}

/// Labels a batch of documents: builds the quality prompt, queries the
/// oracle through the worker pool, and extracts ratings. Output order
/// matches input order.
pub fn label_documents(
    docs: &[CodeDocument],
    client: &dyn CompletionClient,
    opts: &LabelingOptions,
) -> Vec<LabelOutcome> {
    let limiter = opts.requests_per_sec.map(RateLimiter::per_second);
    docs.par_iter()
        .map(|doc| {
            if let Some(l) = &limiter {
                l.acquire();
            }
            let prompt = build_quality_prompt(doc);
            match query_oracle(client, &prompt, &opts.retry) {
                Ok(resp) => match extract_rating(&resp.text) {
                    Ok(raw) => {
                        let explanation = opts.keep_explanations.then(|| resp.text.clone());
                        let label =
                            QualityLabel::new(doc.id.clone(), raw, client.name(), explanation)
                                .expect("extract_rating enforces the range");
                        LabelOutcome {
                            doc_id: doc.id.clone(),
                            label: Some(label),
                            error: None,
                            retries: resp.retries,
                        }
                    }
                    Err(e) => LabelOutcome {
                        doc_id: doc.id.clone(),
                        label: None,
                        error: Some(e.to_string()),
                        retries: resp.retries,
                    },
                },
                Err(e) => LabelOutcome {
                    doc_id: doc.id.clone(),
                    label: None,
                    error: Some(e.to_string()),
                    retries: 0,
                },
            }
        })
        .collect()
}
