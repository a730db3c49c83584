//! The full quality-scoring loop against a mock oracle: build prompts,
//! extract ratings, train the linear scorer, evaluate it, and cut the
//! bottom of the corpus.
//!
//! ```bash
//! cargo run -p codecorpus --example quality_scoring
//! ```

use codecorpus::corpus::{CodeDocument, DocId};
use codecorpus::quality::{
    build_quality_prompt, evaluate_scorer, extract_rating, label_documents, percentile_filter,
    query_oracle, train_scorer, LabelingOptions, MockClient, QualityLabel, RetryPolicy,
    ScorerConfig,
};

/// Synthetic corpus whose "quality" is the comment density.
fn corpus() -> Vec<(CodeDocument, u8)> {
    (0..120)
        .map(|i| {
            let score = (i % 11) as u8;
            let mut content = String::new();
            for c in 0..score {
                content.push_str(&format!("# explains step {c} of the routine\n"));
            }
            for l in 0..(12 - score) {
                content.push_str(&format!("v{l} = step_{}({l})\n", i % 5));
            }
            (CodeDocument::new(format!("doc-{i:03}"), format!("doc{i}.py"), content), score)
        })
        .collect()
}

fn main() -> codecorpus::Result<()> {
    let labeled_corpus = corpus();

    // One document through the prompt -> oracle -> rating path.
    let (first, _) = &labeled_corpus[7];
    let prompt = build_quality_prompt(first);
    println!("prompt head: {}...", &prompt[..68]);
    let mock = MockClient::echoing("Readable and modular. Rating: [[7]]");
    let response = query_oracle(&mock, &prompt, &RetryPolicy::immediate(0))?;
    println!("oracle said {:?} -> rating {}", response.text, extract_rating(&response.text)?);

    // Batch labeling: here the mock replays each document's known score.
    let replies: Vec<_> = labeled_corpus
        .iter()
        .map(|(_, s)| codecorpus::quality::MockOutcome::Reply(format!("Rating: [[{s}]]")))
        .collect();
    let scripted = MockClient::new(replies);
    let docs: Vec<CodeDocument> = labeled_corpus.iter().map(|(d, _)| d.clone()).collect();
    let opts = LabelingOptions { retry: RetryPolicy::immediate(0), ..Default::default() };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("pool");
    let outcomes = pool.install(|| label_documents(&docs, &scripted, &opts));
    let labels: Vec<QualityLabel> = outcomes.into_iter().filter_map(|o| o.label).collect();
    println!("\nlabeled {} documents", labels.len());

    // Train on the first 100, evaluate on the rest.
    let pairs: Vec<(&CodeDocument, &QualityLabel)> =
        docs.iter().zip(labels.iter()).collect();
    let config = ScorerConfig::with_seed(42);
    let outcome = train_scorer(&pairs[..100], &config)?;
    println!(
        "trained: MSE {:.5} -> {:.5} over {} epochs",
        outcome.loss_per_epoch.first().unwrap(),
        outcome.loss_per_epoch.last().unwrap(),
        outcome.loss_per_epoch.len()
    );
    let report = evaluate_scorer(&outcome.model, &pairs[100..])?;
    println!("eval: eps_cmae {:.3}, eps_mae {:.3}", report.eps_cmae, report.eps_mae);

    // Drop the bottom 10% by predicted score.
    let scored: Vec<(DocId, Option<f64>)> = docs
        .iter()
        .map(|d| (d.id.clone(), Some(outcome.model.predict(&d.content))))
        .collect();
    let kept = percentile_filter(&scored, 0.10)?;
    println!("percentile cut kept {} of {}", kept.len(), docs.len());
    Ok(())
}
