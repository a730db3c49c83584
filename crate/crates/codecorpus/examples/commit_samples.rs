//! Commit-data curation: eligibility gates, BM25 retrieval of relevant
//! files, and the code-change-prediction sample format.
//!
//! ```bash
//! cargo run -p codecorpus --example commit_samples
//! ```

use std::collections::BTreeMap;

use codecorpus::commits::{
    bm25_rank, format_commit_sample, parse_target, repo_eligible, CommitRecord,
};
use codecorpus::corpus::RepoSnapshot;

fn main() -> codecorpus::Result<()> {
    let repo = RepoSnapshot {
        repo_id: "acme/houston".into(),
        name: "houston".into(),
        stars: 540,
        forks: 61,
        commit_count: 2310,
        active_days: 800,
        readme: Some("# houston\nMission-control toolkit.".into()),
        ..Default::default()
    };
    println!("repo eligible: {}", repo_eligible(&repo));

    let mut files = BTreeMap::new();
    files.insert("src/telemetry.py".to_string(),
        "def parse_frame(frame):\n    # telemetry frame decoding\n    return frame.split(',')\n".to_string());
    files.insert("src/uplink.py".to_string(),
        "def send(cmd):\n    return radio.transmit(cmd)\n".to_string());
    files.insert("src/parser_utils.py".to_string(),
        "def normalize(frame):\n    return frame.strip()\n# frame parse helpers\n".to_string());
    files.insert("docs/guide.md".to_string(),
        "usage guide for mission control\n".to_string());

    let ranked = bm25_rank(
        "fix telemetry frame parse bug",
        &files.iter().map(|(p, c)| (p.clone(), c.clone())).collect::<Vec<_>>(),
        5,
    )?;
    println!("\nbm25 ranking for the commit message:");
    for (path, score) in &ranked {
        println!("  {score:>7.4}  {path}");
    }

    let record = CommitRecord {
        repo_id: repo.repo_id.clone(),
        message: "fix telemetry frame parse bug".into(),
        patch: "--- a/src/telemetry.py\n+++ b/src/telemetry.py\n@@ -1,3 +1,3 @@\n-    return frame.split(',')\n+    return frame.rstrip().split(',')\n".into(),
        merge_status: false,
        snapshot: repo,
        files,
        modified_paths: vec!["src/telemetry.py".into()],
    };
    let sample = format_commit_sample(&record, 5)?;
    println!("\n--- serialized sample ---\n{}", sample.serialized);

    let (paths, patch) = parse_target(&sample.serialized)?;
    println!("--- target parses back ---\npaths: {paths:?}\npatch bytes: {}", patch.len());
    Ok(())
}
