//! Ingest a directory tree into sharded corpus files and read it back.
//!
//! ```bash
//! cargo run -p codecorpus --example ingest_and_shard
//! ```

use codecorpus::corpus::{infer_language, ingest_tree, shard};

fn main() -> codecorpus::Result<()> {
    let dir = tempfile::tempdir().expect("tempdir");
    let root = dir.path().join("project");
    std::fs::create_dir_all(root.join("src"))?;
    std::fs::write(root.join("src/main.py"), "import util\n\nprint(util.go())\n")?;
    std::fs::write(root.join("src/util.py"), "def go():\n    return 42\n")?;
    std::fs::write(root.join("Makefile"), "all:\n\tpython src/main.py\n")?;
    std::fs::write(root.join("notes.md"), "# notes\nremember to ship\n")?;
    std::fs::write(root.join("blob.bin"), [0xff, 0xfe, 0x00])?;

    let (docs, rejects) = ingest_tree(&root)?;
    println!("ingested {} documents, rejected {}:", docs.len(), rejects.len());
    for doc in &docs {
        println!("  {:<12} {:>5} bytes  id={}", doc.language, doc.byte_len, doc.id);
    }
    for reject in &rejects {
        println!("  rejected {:?}: {}", reject.path, reject.reason);
    }

    // Language inference is a pure function of the path.
    for path in ["deep/nested/job.rs", "Dockerfile", "data.bin"] {
        println!("infer_language({path:?}) = {}", infer_language(path, ""));
    }

    // Shards are line-delimited with a checksum sidecar each.
    let out = dir.path().join("corpus");
    let manifests = shard::write_shards(&out, "part", docs, 2)?;
    println!("\nwrote {} shards:", manifests.len());
    for m in &manifests {
        println!("  {} -> {} records, sha256 {}...", m.shard_id, m.records, &m.checksum[..12]);
    }
    let loaded = shard::read_dir_shards(&out)?;
    println!("round-tripped {} records", loaded.len());
    Ok(())
}
