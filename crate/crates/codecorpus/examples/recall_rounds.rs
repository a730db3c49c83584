//! Recall classifier with iterative hard-negative training: seed pools,
//! round-1 training, mining, and the 2-round loop.
//!
//! ```bash
//! cargo run -p codecorpus --example recall_rounds
//! ```

use std::collections::BTreeMap;

use codecorpus::corpus::{CodeDocument, DocId};
use codecorpus::features::HashedNgramConfig;
use codecorpus::recall::{
    apply_recall, iterate_rounds, mine_hard_negatives, train_recall, RecallConfig, TrainingPools,
};

fn doc(id: &str, text: &str) -> CodeDocument {
    CodeDocument::new(id, format!("{id}.txt"), text)
}

fn main() -> codecorpus::Result<()> {
    // Positives talk about code (with varying amounts of filler); negatives
    // do not; near-misses talk about code but are junk.
    let mut docs = Vec::new();
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    for i in 0..30 {
        let filler = "misc filler words here ".repeat(i % 5);
        let p = doc(
            &format!("pos-{i:02}"),
            &format!("rust compiler tutorial with worked parser examples and tests {filler}"),
        );
        positives.push(p.id.clone());
        docs.push(p);
        let n = doc(&format!("neg-{i:02}"), "celebrity gossip roundup fashion week highlights and rumors");
        negatives.push(n.id.clone());
        docs.push(n);
    }
    let pools = TrainingPools::new(positives, negatives, Vec::<DocId>::new())?;

    let config = RecallConfig {
        features: HashedNgramConfig::new(1 << 16, 2, 9),
        seed: 9,
        ..RecallConfig::default()
    };
    let model = train_recall(&pools, &docs, &config)?;
    let (recalled, scores) = apply_recall(&model, &docs, config.recall_threshold);
    println!("round 1 recalled {} of {} documents", recalled.len(), docs.len());
    println!("sample scores: {:?}", &scores[..2]);

    // Unlabeled pool: concentrated genuine positives (promotable) plus
    // spammy near-misses.
    let mut unlabeled = Vec::new();
    let mut quality = BTreeMap::new();
    for i in 0..10 {
        // Matches the strongest seed variant, so these clear the promotion
        // quantile.
        let good = doc(
            &format!("unl-good-{i:02}"),
            &format!(
                "rust compiler tutorial with worked parser examples and tests {}",
                "misc filler words here ".repeat(2)
            ),
        );
        quality.insert(good.id.clone(), 0.9);
        unlabeled.push(good);
        let miss = doc(
            &format!("unl-miss-{i:02}"),
            "rust compiler tutorial DOWNLOAD FREE crypto casino parser bonus spins",
        );
        quality.insert(miss.id.clone(), 0.05);
        unlabeled.push(miss);
    }

    let mined = mine_hard_negatives(&model, &unlabeled, &quality, &config);
    println!("mined {} hard negatives (recalled but low quality)", mined.len());

    let outcome = iterate_rounds(&pools, &docs, &unlabeled, &quality, 2, &config)?;
    for (i, (promoted, mined)) in outcome.rounds.iter().enumerate() {
        println!("round {}: promoted {promoted}, mined {mined}", i + 2);
    }
    println!(
        "final pools: {} positive / {} random-neg / {} hard-neg (round {})",
        outcome.pools.positives.len(),
        outcome.pools.random_negatives.len(),
        outcome.pools.hard_negatives.len(),
        outcome.model.round,
    );

    let spam = doc("probe", "rust compiler tutorial DOWNLOAD FREE casino bonus parser spins");
    println!(
        "spam probe margin: round1 {:.3} -> final {:.3}",
        model.score(&spam.content),
        outcome.model.score(&spam.content)
    );
    Ok(())
}
