//! Exact (SHA-256) and near (MinHash/LSH) deduplication at file and
//! repository level.
//!
//! ```bash
//! cargo run -p codecorpus --example dedup_corpus
//! ```

use std::collections::BTreeMap;

use codecorpus::corpus::CodeDocument;
use codecorpus::dedup::{
    content_hash_hex, dedup_corpus, estimate_jaccard, repo_level_dedup, LshParams, MinHashConfig,
    Signer,
};

fn main() -> codecorpus::Result<()> {
    let body = "fn handle(req: Request) -> Response { router.dispatch(req).unwrap_or_default() }";
    let near = body.replace("unwrap_or_default", "expect"); // one token differs
    let docs = vec![
        CodeDocument::new("app/router.rs", "app/router.rs", body),
        CodeDocument::new("fork/router.rs", "fork/router.rs", body), // byte-identical
        CodeDocument::new("fork/router_v2.rs", "fork/router_v2.rs", near),
        CodeDocument::new("app/metrics.rs", "app/metrics.rs",
            "pub fn observe(h: &Histogram, v: f64) { h.record(v); } // unrelated code"),
    ];
    println!("content hash of doc 0: {}...", &content_hash_hex(&docs[0])[..16]);

    let minhash = MinHashConfig { k: 256, shingle_w: 2, seed: 1 };
    let lsh = LshParams { threshold: 0.6, bands: 16, rows: 16 };

    let signer = Signer::new(minhash)?;
    let a = signer.sign(&docs[0]);
    let b = signer.sign(&docs[2]);
    println!("estimated jaccard(doc0, doc2) = {:.3}", estimate_jaccard(&a, &b)?);

    let report = dedup_corpus(&docs, &minhash, &lsh)?;
    println!("\nexact groups: {:?}", report.exact_groups);
    for (a, b, est) in &report.near_pairs {
        println!("near pair: {a} ~ {b} (est {est:.3})");
    }
    println!("kept:    {:?}", report.kept);
    for (id, reason) in &report.dropped {
        println!("dropped: {id} ({reason})");
    }

    // Repository level: signatures over the union of member shingles.
    let mut repos: BTreeMap<String, Vec<&CodeDocument>> = BTreeMap::new();
    repos.insert("app".into(), vec![&docs[0], &docs[3]]);
    repos.insert("fork".into(), vec![&docs[1], &docs[2]]);
    let repo_report = repo_level_dedup(&repos, &minhash, &lsh)?;
    println!("\nrepo-level kept: {:?}", repo_report.kept);
    Ok(())
}
