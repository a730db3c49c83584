//! Sharded on-disk persistence: line-delimited records plus a checksum
//! sidecar per shard.
//!
//! Shards are independent units — any number of readers may run concurrently
//! and each shard has a single writer. File layout: `<prefix>-NNNNN.jsonl`
//! with `<prefix>-NNNNN.jsonl.sha256` next to it.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::corpus::CodeDocument;
use crate::error::{Error, Result};

pub const DEFAULT_PREFIX: &str = "part";
const SIDECAR_EXT: &str = "sha256";

/// Metadata for one written shard.
#[derive(Debug, Clone)]
pub struct ShardManifest {
    pub shard_id: String,
    pub path: PathBuf,
    pub records: usize,
    pub checksum: String,
}

/// A fully loaded shard.
#[derive(Debug, Clone)]
pub struct CorpusShard {
    pub shard_id: String,
    pub records: Vec<CodeDocument>,
    pub checksum: String,
}

/// Writes documents into shards of at most `shard_size` records. Records
/// within a shard are sorted by id; ordering is deterministic given a
/// deterministic input order.
pub fn write_shards<I>(
    dir: &Path,
    prefix: &str,
    docs: I,
    shard_size: usize,
) -> Result<Vec<ShardManifest>>
where
    I: IntoIterator<Item = CodeDocument>,
{
    if shard_size == 0 {
        return Err(Error::config("shard_size must be >= 1"));
    }
    fs::create_dir_all(dir)?;
    let mut manifests = Vec::new();
    let mut batch: Vec<CodeDocument> = Vec::with_capacity(shard_size);
    for doc in docs {
        batch.push(doc);
        if batch.len() == shard_size {
            manifests.push(flush_shard(dir, prefix, manifests.len(), &mut batch)?);
        }
    }
    if !batch.is_empty() {
        manifests.push(flush_shard(dir, prefix, manifests.len(), &mut batch)?);
    }
    Ok(manifests)
}

fn flush_shard(
    dir: &Path,
    prefix: &str,
    index: usize,
    batch: &mut Vec<CodeDocument>,
) -> Result<ShardManifest> {
    batch.sort_by(|a, b| a.id.cmp(&b.id));
    let shard_id = format!("{prefix}-{index:05}");
    let path = dir.join(format!("{shard_id}.jsonl"));

    let mut bytes = Vec::new();
    for doc in batch.iter() {
        doc.validate()?;
        serde_json::to_writer(&mut bytes, doc)?;
        bytes.push(b'\n');
    }
    let checksum = hex_sha256(&bytes);

    let mut file = fs::File::create(&path)?;
    file.write_all(&bytes)?;
    fs::write(sidecar_path(&path), format!("{checksum}\n"))?;

    let records = batch.len();
    batch.clear();
    Ok(ShardManifest {
        shard_id,
        path,
        records,
        checksum,
    })
}

/// Lists shard files under a directory, sorted by file name.
pub fn shard_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) == Some("jsonl") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Loads one shard, verifying its checksum first.
pub fn load_shard(path: &Path) -> Result<CorpusShard> {
    let shard_id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("shard")
        .to_string();
    let bytes = fs::read(path)?;
    let actual = hex_sha256(&bytes);
    let sidecar = sidecar_path(path);
    let expected = fs::read_to_string(&sidecar)
        .map_err(|_| Error::ChecksumMissing {
            shard: shard_id.clone(),
        })?
        .trim()
        .to_string();
    if expected != actual {
        return Err(Error::ChecksumMismatch {
            shard: shard_id,
            expected,
            actual,
        });
    }
    let mut records = Vec::new();
    for line in bytes.split(|&b| b == b'\n') {
        if line.is_empty() {
            continue;
        }
        let doc: CodeDocument = serde_json::from_slice(line)?;
        doc.validate()?;
        records.push(doc);
    }
    Ok(CorpusShard {
        shard_id,
        records,
        checksum: actual,
    })
}

/// Reads every record from the given shard files exactly once. A checksum
/// mismatch aborts with a diagnostic naming the shard.
pub fn read_shards(paths: &[PathBuf]) -> Result<Vec<CodeDocument>> {
    let mut docs = Vec::new();
    for path in paths {
        docs.extend(load_shard(path)?.records);
    }
    Ok(docs)
}

/// Convenience: read all shards under a directory.
pub fn read_dir_shards(dir: &Path) -> Result<Vec<CodeDocument>> {
    read_shards(&shard_files(dir)?)
}

fn sidecar_path(shard: &Path) -> PathBuf {
    let mut os = shard.as_os_str().to_owned();
    os.push(".");
    os.push(SIDECAR_EXT);
    PathBuf::from(os)
}

fn hex_sha256(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}
