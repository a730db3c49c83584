//! End-to-end pipeline run from a TOML config: ingest -> dedup -> filter ->
//! fim, with per-stage statistics and a suffix re-run.
//!
//! ```bash
//! cargo run -p codecorpus --example full_pipeline
//! ```

use std::fs;

use codecorpus::pipeline::{load_config, run_pipeline, run_pipeline_from};

fn main() -> codecorpus::Result<()> {
    let dir = tempfile::tempdir().expect("tempdir");
    let raw = dir.path().join("raw");
    fs::create_dir_all(raw.join("repo/src"))?;
    for i in 0..60 {
        let body = match i % 6 {
            0 => "def shared():\n    return 42\n".to_string(), // duplicate cluster
            1 => format!("def broken_{i}(:\n"),                // syntax error
            _ => format!("def task_{i}():\n    # processes bucket {i}\n    return {i} * 7\n"),
        };
        fs::write(raw.join(format!("repo/src/m{i:02}.py")), body)?;
    }

    let config_path = dir.path().join("pipeline.toml");
    fs::write(
        &config_path,
        format!(
            r#"
seed = 42
input_root = "{}"
output_root = "{}"
shard_size = 32

[[stage]]
name = "ingest"

[[stage]]
name = "dedup"
threshold = 0.85
k = 128
bands = 16
rows = 8
shingle = 3

[[stage]]
name = "filter"
rules = ["syntax"]

[[stage]]
name = "fim"
ratio = 0.5
mode = "spm"
"#,
            raw.display(),
            dir.path().join("out").display()
        ),
    )?;

    let config = load_config(&config_path)?;
    let outcome = run_pipeline(&config)?;
    println!("{}", outcome.stats);
    for row in &outcome.stats.rows {
        if !row.drop_reasons.is_empty() {
            println!("{} drops: {:?}", row.stage, row.drop_reasons);
        }
    }

    // Any suffix can re-run on its own; outputs are versioned, immutable.
    let rerun = run_pipeline_from(&config, 4)?;
    println!("suffix re-run of stage 4:\n{}", rerun.stats);
    println!("stage dirs under {}:", dir.path().join("out").display());
    let mut entries: Vec<_> = fs::read_dir(dir.path().join("out"))?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().to_string())
        .collect();
    entries.sort();
    for entry in entries {
        println!("  {entry}");
    }
    Ok(())
}
