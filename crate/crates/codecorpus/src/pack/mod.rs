//! Repository-level long-context packing.
//!
//! Mainstream languages get topological concatenation over their static
//! dependency graphs; languages without import rules use seeded random
//! concatenation. Estimated sizes are `ceil(bytes / 4)` so the pipeline
//! stays tokenizer-free.

pub mod decompose;
pub mod deps;
pub mod topo;

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hashing::hash64;

pub use decompose::{decompose_oversize, Subgraph};
pub use deps::{extract_deps, extract_deps_with, rules_for, DepGraph, ImportRules};
pub use topo::{topo_order, verify_topological};

/// Per-file header line inside a packed sequence.
pub const FILE_HEADER_PREFIX: &str = "// FILE: ";

/// A repository's files ready for packing.
#[derive(Debug, Clone)]
pub struct RepoFiles {
    pub repo_id: String,
    /// (path, content) pairs.
    pub files: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PackedSequence {
    pub repo_id: String,
    /// File paths in emission order.
    pub files: Vec<String>,
    /// Concatenated text with one header line per file.
    pub text: String,
    pub token_estimate: u64,
    /// Set when a single file alone exceeds the cap.
    pub oversize: bool,
}

/// ceil(bytes / 4); the tokenizer-free size estimate.
pub fn token_estimate(bytes: usize) -> u64 {
    (bytes as u64).div_ceil(4)
}

fn render_sequence(repo: &RepoFiles, ordered: &[String], oversize: bool) -> PackedSequence {
    let mut text = String::new();
    for path in ordered {
        let content = repo
            .files
            .iter()
            .find(|(p, _)| p == path)
            .map(|(_, c)| c.as_str())
            .unwrap_or("");
        text.push_str(FILE_HEADER_PREFIX);
        text.push_str(path);
        text.push('\n');
        text.push_str(content);
        if !text.ends_with('\n') {
            text.push('\n');
        }
    }
    PackedSequence {
        repo_id: repo.repo_id.clone(),
        files: ordered.to_vec(),
        token_estimate: token_estimate(text.len()),
        text,
        oversize,
    }
}

/// Topological packing: the dependency graph is decomposed to fit `cap`,
/// then each subgraph is emitted with every imported file preceding its
/// importers (cycles collapse into adjacent path-ordered runs).
pub fn topo_pack(repo: &RepoFiles, graph: &DepGraph, cap: u64) -> Result<Vec<PackedSequence>> {
    let sizes: Vec<u64> = graph
        .nodes
        .iter()
        .map(|path| {
            repo.files
                .iter()
                .find(|(p, _)| p == path)
                .map(|(_, c)| token_estimate(c.len()))
                .unwrap_or(0)
        })
        .collect();
    let subgraphs = decompose_oversize(graph, &sizes, cap)?;
    let mut sequences = Vec::with_capacity(subgraphs.len());
    for sub in subgraphs {
        let keep: BTreeSet<usize> = sub.nodes.iter().copied().collect();
        let restricted = graph.restricted(&keep);
        let order = topo_order(&restricted);
        sequences.push(render_sequence(repo, &order, sub.oversize));
    }
    Ok(sequences)
}

/// Random packing: a seeded uniform shuffle of the files, chunked by `cap`.
/// The RNG key mixes the repo id so corpora pack independently of repo
/// iteration order, while a fixed (seed, repo) pair is fully deterministic.
pub fn random_pack(repo: &RepoFiles, seed: u64, cap: u64) -> Result<Vec<PackedSequence>> {
    if cap == 0 {
        return Err(crate::error::Error::config("size cap must be positive"));
    }
    let mut paths: Vec<String> = repo.files.iter().map(|(p, _)| p.clone()).collect();
    paths.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(hash64(repo.repo_id.as_bytes(), seed));
    paths.shuffle(&mut rng);

    let mut sequences = Vec::new();
    let mut chunk: Vec<String> = Vec::new();
    let mut chunk_size = 0u64;
    for path in paths {
        let size = repo
            .files
            .iter()
            .find(|(p, _)| *p == path)
            .map(|(_, c)| token_estimate(c.len()))
            .unwrap_or(0);
        if size > cap {
            if !chunk.is_empty() {
                sequences.push(render_sequence(repo, &chunk, false));
                chunk = Vec::new();
                chunk_size = 0;
            }
            sequences.push(render_sequence(repo, &[path], true));
            continue;
        }
        if chunk_size + size > cap && !chunk.is_empty() {
            sequences.push(render_sequence(repo, &chunk, false));
            chunk = Vec::new();
            chunk_size = 0;
        }
        chunk_size += size;
        chunk.push(path);
    }
    if !chunk.is_empty() {
        sequences.push(render_sequence(repo, &chunk, false));
    }
    Ok(sequences)
}

/// Checks the partition property: every repo file appears exactly once
/// across the sequences.
pub fn verify_partition(repo: &RepoFiles, sequences: &[PackedSequence]) -> bool {
    let mut seen = BTreeSet::new();
    for seq in sequences {
        for path in &seq.files {
            if !seen.insert(path.clone()) {
                return false;
            }
        }
    }
    let expected: BTreeSet<String> = repo.files.iter().map(|(p, _)| p.clone()).collect();
    seen == expected
}
