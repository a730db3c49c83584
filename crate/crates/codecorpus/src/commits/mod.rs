//! Commit-data curation: repository eligibility, BM25 retrieval of relevant
//! files, and code-change-prediction sample formatting.

pub mod bm25;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::RepoSnapshot;
use crate::dedup::content_hash_bytes;
use crate::error::{Error, Result};

pub use bm25::{bm25_rank, BM25_B, BM25_K1};

/// Maximum number of retrieved context files per sample.
pub const RETRIEVED_FILES_CAP: usize = 5;

/// Repository eligibility thresholds.
pub const MIN_STARS: u64 = 100;
pub const MIN_FORKS: u64 = 10;
pub const MIN_COMMITS: u64 = 100;
pub const MIN_ACTIVE_DAYS: u64 = 100;

/// One commit with its pre-commit snapshot. File contents are embedded so a
/// record is self-contained on the wire.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommitRecord {
    pub repo_id: String,
    pub message: String,
    /// Unified-diff text.
    pub patch: String,
    pub merge_status: bool,
    pub snapshot: RepoSnapshot,
    /// Pre-commit file contents keyed by path.
    pub files: BTreeMap<String, String>,
    pub modified_paths: Vec<String>,
}

impl CommitRecord {
    /// `modified_paths` must be non-empty; paths absent from the snapshot
    /// count as file creations.
    pub fn validate(&self) -> Result<()> {
        if self.modified_paths.is_empty() {
            return Err(Error::invalid(format!(
                "commit in {} has no modified paths",
                self.repo_id
            )));
        }
        Ok(())
    }

    /// Modified paths not resolvable against the snapshot: file creations.
    pub fn created_paths(&self) -> Vec<&str> {
        self.modified_paths
            .iter()
            .filter(|p| !self.files.contains_key(*p))
            .map(|p| p.as_str())
            .collect()
    }
}

/// A formatted code-change-prediction sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommitSample {
    pub repo_id: String,
    pub readme: String,
    pub directory_structure: String,
    /// At most [`RETRIEVED_FILES_CAP`] (path, content) pairs.
    pub retrieved_files: Vec<(String, String)>,
    pub message: String,
    pub target_paths: Vec<String>,
    pub patch: String,
    pub serialized: String,
}

const SEC_README: &str = "=== README ===";
const SEC_TREE: &str = "=== DIRECTORY STRUCTURE ===";
const SEC_RETRIEVED: &str = "=== RETRIEVED FILES ===";
const SEC_MESSAGE: &str = "=== COMMIT MESSAGE ===";
const SEC_TARGET: &str = "=== TARGET FILES ===";
const SEC_PATCH: &str = "=== PATCH ===";
const FILE_MARK: &str = "--- FILE: ";

/// True iff the repository meets all four activity thresholds.
pub fn repo_eligible(repo: &RepoSnapshot) -> bool {
    repo.stars >= MIN_STARS
        && repo.forks >= MIN_FORKS
        && repo.commit_count >= MIN_COMMITS
        && repo.active_days >= MIN_ACTIVE_DAYS
}

/// Formats one commit as a prediction sample: README, directory tree,
/// BM25-retrieved files (query = commit message, top 5), the message, then
/// the target (modified paths + patch). Layout is fixed; a missing README
/// leaves that section empty.
pub fn format_commit_sample(record: &CommitRecord, top_k: usize) -> Result<CommitSample> {
    record.validate()?;
    let files: Vec<(String, String)> = record
        .files
        .iter()
        .map(|(p, c)| (p.clone(), c.clone()))
        .collect();
    let cap = top_k.clamp(1, RETRIEVED_FILES_CAP);
    let retrieved: Vec<(String, String)> = if files.is_empty() {
        Vec::new()
    } else {
        bm25_rank(&record.message, &files, cap)?
            .into_iter()
            .map(|(path, _)| {
                let content = record.files[&path].clone();
                (path, content)
            })
            .collect()
    };
    let readme = record.snapshot.readme.clone().unwrap_or_default();
    let tree = render_tree(record.files.keys().map(|s| s.as_str()));

    let mut out = String::new();
    out.push_str(SEC_README);
    out.push('\n');
    out.push_str(&readme);
    ensure_newline(&mut out);
    out.push_str(SEC_TREE);
    out.push('\n');
    out.push_str(&tree);
    ensure_newline(&mut out);
    out.push_str(SEC_RETRIEVED);
    out.push('\n');
    for (path, content) in &retrieved {
        out.push_str(FILE_MARK);
        out.push_str(path);
        out.push_str(" ---\n");
        out.push_str(content);
        ensure_newline(&mut out);
    }
    out.push_str(SEC_MESSAGE);
    out.push('\n');
    out.push_str(&record.message);
    ensure_newline(&mut out);
    out.push_str(SEC_TARGET);
    out.push('\n');
    for path in &record.modified_paths {
        out.push_str(path);
        out.push('\n');
    }
    out.push_str(SEC_PATCH);
    out.push('\n');
    out.push_str(&record.patch);

    Ok(CommitSample {
        repo_id: record.repo_id.clone(),
        readme,
        directory_structure: tree,
        retrieved_files: retrieved,
        message: record.message.clone(),
        target_paths: record.modified_paths.clone(),
        patch: record.patch.clone(),
        serialized: out,
    })
}

/// Parses the target section back out of a serialized sample.
pub fn parse_target(serialized: &str) -> Result<(Vec<String>, String)> {
    let target_mark = format!("{SEC_TARGET}\n");
    let patch_mark = format!("{SEC_PATCH}\n");
    let target_at = serialized
        .find(&target_mark)
        .ok_or_else(|| Error::invalid("sample has no target section"))?;
    let after_target = &serialized[target_at + target_mark.len()..];
    let patch_at = after_target
        .find(&patch_mark)
        .ok_or_else(|| Error::invalid("sample has no patch section"))?;
    let paths: Vec<String> = after_target[..patch_at]
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| l.to_string())
        .collect();
    let patch = after_target[patch_at + patch_mark.len()..].to_string();
    Ok((paths, patch))
}

fn ensure_newline(out: &mut String) {
    if !out.ends_with('\n') {
        out.push('\n');
    }
}

/// Renders paths as a sorted indented listing, directories suffixed with `/`.
fn render_tree<'a>(paths: impl Iterator<Item = &'a str>) -> String {
    let mut sorted: Vec<&str> = paths.collect();
    sorted.sort_unstable();
    let mut out = String::new();
    let mut emitted_dirs: Vec<String> = Vec::new();
    for path in sorted {
        let segments: Vec<&str> = path.split('/').collect();
        for depth in 0..segments.len() - 1 {
            let dir = segments[..=depth].join("/");
            if !emitted_dirs.contains(&dir) {
                for _ in 0..depth {
                    out.push_str("  ");
                }
                out.push_str(segments[depth]);
                out.push_str("/\n");
                emitted_dirs.push(dir);
            }
        }
        for _ in 0..segments.len() - 1 {
            out.push_str("  ");
        }
        out.push_str(segments[segments.len() - 1]);
        out.push('\n');
    }
    out
}

/// Exact dedup over (message, patch): returns the indices of surviving
/// records, first occurrence kept.
pub fn dedup_commits(records: &[CommitRecord]) -> Vec<usize> {
    let mut seen = std::collections::HashSet::new();
    let mut kept = Vec::new();
    for (idx, record) in records.iter().enumerate() {
        let mut key = Vec::with_capacity(record.message.len() + record.patch.len() + 1);
        key.extend_from_slice(record.message.as_bytes());
        key.push(0);
        key.extend_from_slice(record.patch.as_bytes());
        if seen.insert(content_hash_bytes(&key)) {
            kept.push(idx);
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;

    fn repo(stars: u64, forks: u64, commits: u64, days: u64) -> RepoSnapshot {
        RepoSnapshot {
            repo_id: "r".into(),
            name: "r".into(),
            stars,
            forks,
            commit_count: commits,
            active_days: days,
            ..Default::default()
        }
    }

    fn record(file_count: usize) -> CommitRecord {
        let mut files = BTreeMap::new();
        for i in 0..file_count {
            files.insert(
                format!("src/mod{i}.py"),
                format!("def handler_{i}():\n    return parse_input({i})\n"),
            );
        }
        files.insert("docs/guide.md".into(), "usage guide with parse examples".into());
        CommitRecord {
            repo_id: "acme/widget".into(),
            message: "fix parse crash on empty input".into(),
            patch: "--- a/src/mod0.py\n+++ b/src/mod0.py\n@@ -1 +1 @@\n-old\n+new\n".into(),
            merge_status: false,
            snapshot: RepoSnapshot {
                repo_id: "acme/widget".into(),
                name: "widget".into(),
                readme: Some("# widget\nParses things.".into()),
                ..Default::default()
            },
            files,
            modified_paths: vec!["src/mod0.py".into()],
        }
    }

    #[test]
    fn eligibility_boundary_truth_table() {
        assert!(repo_eligible(&repo(100, 10, 100, 100)));
        assert!(!repo_eligible(&repo(99, 10, 100, 100)));
        assert!(!repo_eligible(&repo(100, 9, 100, 100)));
        assert!(!repo_eligible(&repo(100, 10, 99, 100)));
        assert!(!repo_eligible(&repo(100, 10, 100, 99)));
        assert!(!repo_eligible(&repo(1000, 0, 500, 400)));
        assert!(repo_eligible(&repo(5000, 800, 12000, 900)));
    }

    #[test]
    fn seven_candidates_yield_exactly_five_retrieved() {
        let sample = format_commit_sample(&record(6), 5).unwrap();
        assert_eq!(sample.retrieved_files.len(), 5);
    }

    #[test]
    fn two_candidates_yield_two_retrieved() {
        let sample = format_commit_sample(&record(1), 5).unwrap();
        assert_eq!(sample.retrieved_files.len(), 2);
    }

    #[test]
    fn target_section_round_trips() {
        let rec = record(3);
        let sample = format_commit_sample(&rec, 5).unwrap();
        let (paths, patch) = parse_target(&sample.serialized).unwrap();
        assert_eq!(paths, rec.modified_paths);
        assert_eq!(patch, rec.patch);
    }

    #[test]
    fn formatting_is_deterministic_with_fixed_section_order() {
        let rec = record(4);
        let a = format_commit_sample(&rec, 5).unwrap();
        let b = format_commit_sample(&rec, 5).unwrap();
        assert_eq!(a.serialized, b.serialized);
        let order = [SEC_README, SEC_TREE, SEC_RETRIEVED, SEC_MESSAGE, SEC_TARGET, SEC_PATCH];
        let mut last = 0;
        for mark in order {
            let at = a.serialized.find(mark).expect(mark);
            assert!(at >= last, "{mark} out of order");
            last = at;
        }
    }

    #[test]
    fn missing_readme_leaves_an_empty_section() {
        let mut rec = record(2);
        rec.snapshot.readme = None;
        let sample = format_commit_sample(&rec, 5).unwrap();
        assert!(sample.serialized.starts_with("=== README ===\n=== DIRECTORY STRUCTURE ==="));
        assert!(sample.readme.is_empty());
    }

    #[test]
    fn tree_is_sorted_and_indented() {
        let rec = record(2);
        let sample = format_commit_sample(&rec, 5).unwrap();
        assert_eq!(
            sample.directory_structure,
            "docs/\n  guide.md\nsrc/\n  mod0.py\n  mod1.py\n"
        );
    }

    #[test]
    fn empty_modified_paths_is_invalid() {
        let mut rec = record(1);
        rec.modified_paths.clear();
        assert!(rec.validate().is_err());
    }

    #[test]
    fn created_paths_are_the_unresolvable_ones() {
        let mut rec = record(1);
        rec.modified_paths.push("src/brand_new.py".into());
        assert_eq!(rec.created_paths(), vec!["src/brand_new.py"]);
    }

    #[test]
    fn commit_dedup_is_exact_on_message_and_patch() {
        let a = record(1);
        let mut b = record(1);
        b.repo_id = "someone/else".into();
        let mut c = record(1);
        c.message = "different message".into();
        let kept = dedup_commits(&[a, b, c]);
        assert_eq!(kept, vec![0, 2]);
    }
}
