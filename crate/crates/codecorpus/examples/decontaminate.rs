//! Benchmark decontamination: build a word 10-gram index and scrub a
//! corpus against it.
//!
//! ```bash
//! cargo run -p codecorpus --example decontaminate
//! ```

use codecorpus::corpus::CodeDocument;
use codecorpus::decontam::{build_index, normalize_words, scrub, IndexMode};

fn main() -> codecorpus::Result<()> {
    let benchmarks = vec![(
        "demo-eval".to_string(),
        vec![
            "write a function that returns the sum of two integer arguments without overflow"
                .to_string(),
            "given a list of strings return the longest common prefix shared by all entries"
                .to_string(),
        ],
    )];
    let index = build_index(&benchmarks, 10, IndexMode::Exact, 0)?;
    println!(
        "indexed {} grams from {} benchmark items",
        index.gram_count(),
        benchmarks[0].1.len()
    );
    println!("normalize: {:?}", normalize_words("Given, a LIST of strings!"));

    let docs = vec![
        CodeDocument::new("leaky.md", "leaky.md",
            "tutorial snippet: Write a function that returns the sum of two integer arguments without overflow, step by step"),
        CodeDocument::new("near.md", "near.md",
            // Shares only 9 consecutive words, then diverges.
            "write a function that returns the sum of two floats instead of anything else"),
        CodeDocument::new("clean.md", "clean.md",
            "a completely unrelated walkthrough about sorting networks and their gate counts"),
    ];
    let report = scrub(&docs, &index);
    for removed in &report.removed {
        println!(
            "removed {} (matched {} at word offset {})",
            removed.doc_id, removed.benchmark, removed.word_offset
        );
    }
    for id in &report.kept {
        println!("kept    {id}");
    }

    // Exact mode keeps the normalized gram strings for audits.
    let gram = "write a function that returns the sum of two integer";
    println!("\naudit lookup {gram:?} -> {:?}", index.lookup_exact(gram));
    Ok(())
}
