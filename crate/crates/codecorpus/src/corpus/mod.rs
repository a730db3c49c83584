//! Canonical document and repository model shared by every pipeline stage.
//!
//! Documents are immutable after ingestion; stages attach their outputs by
//! producing new records with an extra entry in `tags`.

pub mod language;
pub mod shard;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use language::{infer_language, UNKNOWN};
pub use shard::{read_shards, shard_files, write_shards, CorpusShard, ShardManifest};

/// Opaque stable document identifier, unique within a corpus. Ordered
/// lexicographically; survivor selection and tie-breaking rely on that order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DocId(String);

impl DocId {
    pub fn new(id: impl Into<String>) -> Self {
        DocId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DocId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for DocId {
    fn from(s: &str) -> Self {
        DocId(s.to_string())
    }
}

/// One source file or web page, plus metadata accumulated by pipeline stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeDocument {
    pub id: DocId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repo_id: Option<String>,
    pub path: String,
    pub language: String,
    pub content: String,
    pub byte_len: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tags: BTreeMap<String, serde_json::Value>,
}

impl CodeDocument {
    /// Builds a document, inferring the language and byte length from the
    /// path and content.
    pub fn new(id: impl Into<String>, path: impl Into<String>, content: impl Into<String>) -> Self {
        let path = path.into();
        let content = content.into();
        let language = language::infer_language(&path, &content).to_string();
        let byte_len = content.len() as u64;
        CodeDocument {
            id: DocId::new(id),
            repo_id: None,
            path,
            language,
            content,
            byte_len,
            tags: BTreeMap::new(),
        }
    }

    pub fn with_repo(mut self, repo_id: impl Into<String>) -> Self {
        self.repo_id = Some(repo_id.into());
        self
    }

    /// Returns a copy with a stage tag attached (documents are immutable;
    /// stages produce new records).
    pub fn with_tag(&self, stage: &str, value: serde_json::Value) -> Self {
        let mut doc = self.clone();
        doc.tags.insert(stage.to_string(), value);
        doc
    }

    /// Reads a numeric stage tag, e.g. the quality score.
    pub fn tag_f64(&self, stage: &str) -> Option<f64> {
        self.tags.get(stage).and_then(|v| v.as_f64())
    }

    /// Checks the structural invariants that every stage relies on.
    pub fn validate(&self) -> Result<()> {
        if self.byte_len != self.content.len() as u64 {
            return Err(Error::invalid(format!(
                "document {}: byte_len {} does not match content length {}",
                self.id,
                self.byte_len,
                self.content.len()
            )));
        }
        if !language::is_supported(&self.language) {
            return Err(Error::invalid(format!(
                "document {}: language {:?} is not in the supported table",
                self.id, self.language
            )));
        }
        Ok(())
    }
}

/// A repository: metadata, member documents, and static dependency edges.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RepoSnapshot {
    pub repo_id: String,
    pub name: String,
    pub stars: u64,
    pub forks: u64,
    pub commit_count: u64,
    pub active_days: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readme: Option<String>,
    #[serde(default)]
    pub documents: Vec<DocId>,
    /// (importer path, imported path) pairs.
    #[serde(default)]
    pub dep_edges: Vec<(String, String)>,
}

impl RepoSnapshot {
    /// Validates dependency edges against the repository's member paths.
    pub fn validate_edges(&self, member_paths: &BTreeSet<String>) -> Result<()> {
        for (from, to) in &self.dep_edges {
            if !member_paths.contains(from) || !member_paths.contains(to) {
                return Err(Error::invalid(format!(
                    "repo {}: dep edge {from} -> {to} references a non-member path",
                    self.repo_id
                )));
            }
        }
        Ok(())
    }
}

/// A document that could not be ingested, with the reason.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestReject {
    pub path: PathBuf,
    pub reason: String,
}

/// Walks a directory tree and builds one document per regular file, using the
/// path relative to `root` as the stable id. Non-UTF-8 files are rejected
/// with a logged reason rather than transcoded.
pub fn ingest_tree(root: &Path) -> Result<(Vec<CodeDocument>, Vec<IngestReject>)> {
    let mut docs = Vec::new();
    let mut rejects = Vec::new();
    let walker = walkdir::WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| !is_hidden(e));
    for entry in walker {
        let entry = entry.map_err(|e| Error::invalid(format!("walk error under {root:?}: {e}")))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .unwrap_or(entry.path())
            .to_string_lossy()
            .replace('\\', "/");
        let bytes = std::fs::read(entry.path())?;
        match String::from_utf8(bytes) {
            Ok(content) => docs.push(CodeDocument::new(rel.clone(), rel, content)),
            Err(_) => {
                log::warn!("rejecting non-UTF-8 file {}", entry.path().display());
                rejects.push(IngestReject {
                    path: entry.path().to_path_buf(),
                    reason: "non-UTF-8 content".to_string(),
                });
            }
        }
    }
    Ok((docs, rejects))
}

fn is_hidden(entry: &walkdir::DirEntry) -> bool {
    entry.depth() > 0
        && entry
            .file_name()
            .to_str()
            .map(|s| s.starts_with('.'))
            .unwrap_or(false)
}

/// Groups documents into per-repository path/content views, keyed by
/// `repo_id` when present and by the first path segment otherwise.
pub fn group_by_repo(docs: &[CodeDocument]) -> BTreeMap<String, Vec<&CodeDocument>> {
    let mut groups: BTreeMap<String, Vec<&CodeDocument>> = BTreeMap::new();
    for doc in docs {
        let key = match &doc.repo_id {
            Some(r) => r.clone(),
            None => doc
                .path
                .split('/')
                .next()
                .unwrap_or(doc.path.as_str())
                .to_string(),
        };
        groups.entry(key).or_default().push(doc);
    }
    groups
}
