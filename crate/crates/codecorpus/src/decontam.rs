//! Benchmark decontamination by word n-gram overlap (default n = 10).
//!
//! Words are Unicode-whitespace split, lowercased, and stripped of leading
//! and trailing non-alphanumerics; a document is removed when any of its
//! n-grams appears in the benchmark index. Items shorter than n words
//! contribute their whole word sequence as a single gram (conservative) and
//! are flagged; scrubbing slides windows at every indexed gram length.
//!
//! Grams are stored as 128-bit hashes with the (seed, algorithm) recorded;
//! an exact-set mode retaining the normalized gram strings is available for
//! audits.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binfmt;
use crate::corpus::{CodeDocument, DocId};
use crate::error::{Error, Result};
use crate::hashing::{hash128, HASH_ALGORITHM};

const INDEX_MAGIC: &[u8; 8] = b"CCNGIDX1";
pub const DEFAULT_NGRAM: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexMode {
    Hashed,
    /// Also retains the normalized gram strings, for audits.
    Exact,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceEntry {
    pub name: String,
    pub items: usize,
}

#[derive(Debug, Clone)]
pub struct NgramIndex {
    pub n: usize,
    pub seed: u64,
    pub algorithm: String,
    pub mode: IndexMode,
    /// Benchmark names with item counts.
    pub manifest: Vec<SourceEntry>,
    /// Items shorter than n words, indexed whole and flagged.
    pub short_items: usize,
    /// gram length -> gram hash -> index of the first source that added it.
    grams: HashMap<usize, HashMap<(u64, u64), u32>>,
    /// Exact mode only: gram length -> normalized gram string -> source.
    exact: Option<HashMap<usize, HashMap<String, u32>>>,
}

/// Lowercased words with edge punctuation stripped; empty tokens dropped.
pub fn normalize_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|t| {
            t.trim_matches(|c: char| !c.is_alphanumeric())
                .to_lowercase()
        })
        .filter(|t| !t.is_empty())
        .collect()
}

fn gram_key(words: &[String]) -> String {
    words.join("\u{1f}")
}

impl NgramIndex {
    pub fn gram_count(&self) -> usize {
        self.grams.values().map(|m| m.len()).sum()
    }

    /// Indexed gram lengths, ascending.
    pub fn lengths(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.grams.keys().copied().collect();
        lens.sort_unstable();
        lens
    }

    fn lookup(&self, words: &[String]) -> Option<u32> {
        let by_len = self.grams.get(&words.len())?;
        let key = gram_key(words);
        by_len.get(&hash128(key.as_bytes(), self.seed)).copied()
    }

    /// Exact-mode audit lookup by gram string.
    pub fn lookup_exact(&self, gram: &str) -> Option<&str> {
        let exact = self.exact.as_ref()?;
        let words = normalize_words(gram);
        exact
            .get(&words.len())
            .and_then(|m| m.get(&gram_key(&words)))
            .map(|&src| self.manifest[src as usize].name.as_str())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let header = IndexHeader {
            n: self.n,
            seed: self.seed,
            algorithm: self.algorithm.clone(),
            mode: self.mode,
            manifest: self.manifest.clone(),
            short_items: self.short_items,
        };
        let mut payload = Vec::new();
        let mut lens = self.lengths();
        lens.sort_unstable();
        payload.extend_from_slice(&(lens.len() as u64).to_le_bytes());
        for len in lens {
            let entries = &self.grams[&len];
            payload.extend_from_slice(&(len as u64).to_le_bytes());
            payload.extend_from_slice(&(entries.len() as u64).to_le_bytes());
            let mut sorted: Vec<(&(u64, u64), &u32)> = entries.iter().collect();
            sorted.sort();
            for (&(a, b), &src) in sorted {
                payload.extend_from_slice(&a.to_le_bytes());
                payload.extend_from_slice(&b.to_le_bytes());
                payload.extend_from_slice(&src.to_le_bytes());
            }
        }
        binfmt::write_container(path, INDEX_MAGIC, &header, &payload)
    }

    /// Loads a hashed index. Exact-mode gram strings are not persisted;
    /// a loaded index always behaves as hashed.
    pub fn load(path: &Path) -> Result<Self> {
        let container: binfmt::Container<IndexHeader> =
            binfmt::read_container(path, INDEX_MAGIC)?;
        let header = container.header;
        let p = &container.payload;
        let mut at = 0usize;
        let len_count = read_u64(p, &mut at, path)? as usize;
        let mut grams = HashMap::new();
        for _ in 0..len_count {
            let len = read_u64(p, &mut at, path)? as usize;
            let count = read_u64(p, &mut at, path)? as usize;
            let mut entries = HashMap::with_capacity(count);
            for _ in 0..count {
                let a = read_u64(p, &mut at, path)?;
                let b = read_u64(p, &mut at, path)?;
                let src = read_u32(p, &mut at, path)?;
                entries.insert((a, b), src);
            }
            grams.insert(len, entries);
        }
        Ok(NgramIndex {
            n: header.n,
            seed: header.seed,
            algorithm: header.algorithm,
            mode: IndexMode::Hashed,
            manifest: header.manifest,
            short_items: header.short_items,
            grams,
            exact: None,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct IndexHeader {
    n: usize,
    seed: u64,
    algorithm: String,
    mode: IndexMode,
    manifest: Vec<SourceEntry>,
    short_items: usize,
}

fn read_u64(p: &[u8], at: &mut usize, path: &Path) -> Result<u64> {
    let slice = p.get(*at..*at + 8).ok_or_else(|| Error::ModelFormat {
        path: path.to_path_buf(),
        reason: "truncated index payload".into(),
    })?;
    *at += 8;
    Ok(u64::from_le_bytes(slice.try_into().unwrap()))
}

fn read_u32(p: &[u8], at: &mut usize, path: &Path) -> Result<u32> {
    let slice = p.get(*at..*at + 4).ok_or_else(|| Error::ModelFormat {
        path: path.to_path_buf(),
        reason: "truncated index payload".into(),
    })?;
    *at += 4;
    Ok(u32::from_le_bytes(slice.try_into().unwrap()))
}

/// Builds the index over benchmark items: every word n-gram of every item,
/// with short items contributing their full sequence as one flagged gram.
pub fn build_index(
    benchmarks: &[(String, Vec<String>)],
    n: usize,
    mode: IndexMode,
    seed: u64,
) -> Result<NgramIndex> {
    if n == 0 {
        return Err(Error::config("n-gram order must be >= 1"));
    }
    let mut grams: HashMap<usize, HashMap<(u64, u64), u32>> = HashMap::new();
    let mut exact: Option<HashMap<usize, HashMap<String, u32>>> = match mode {
        IndexMode::Exact => Some(HashMap::new()),
        IndexMode::Hashed => None,
    };
    let mut manifest = Vec::new();
    let mut short_items = 0usize;

    for (src_idx, (name, items)) in benchmarks.iter().enumerate() {
        manifest.push(SourceEntry { name: name.clone(), items: items.len() });
        for item in items {
            let words = normalize_words(item);
            if words.is_empty() {
                continue;
            }
            let windows: Vec<&[String]> = if words.len() < n {
                log::warn!(
                    "benchmark {name}: item with {} words indexed whole (< {n})",
                    words.len()
                );
                short_items += 1;
                vec![&words[..]]
            } else {
                words.windows(n).collect()
            };
            for window in windows {
                let key = gram_key(window);
                grams
                    .entry(window.len())
                    .or_default()
                    .entry(hash128(key.as_bytes(), seed))
                    .or_insert(src_idx as u32);
                if let Some(exact) = exact.as_mut() {
                    exact
                        .entry(window.len())
                        .or_default()
                        .entry(key)
                        .or_insert(src_idx as u32);
                }
            }
        }
    }
    Ok(NgramIndex {
        n,
        seed,
        algorithm: HASH_ALGORITHM.to_string(),
        mode,
        manifest,
        short_items,
        grams,
        exact,
    })
}

/// A removed document with the benchmark that contaminated it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RemovedDoc {
    pub doc_id: DocId,
    pub benchmark: String,
    /// Word offset of the first matching gram.
    pub word_offset: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ScrubReport {
    pub kept: BTreeSet<DocId>,
    pub removed: Vec<RemovedDoc>,
}

/// Removes every document sharing an indexed gram with a benchmark. The
/// reason names the source of the first matching gram in document scan
/// order (shorter indexed lengths first, then left to right).
pub fn scrub(docs: &[CodeDocument], index: &NgramIndex) -> ScrubReport {
    let lengths = index.lengths();
    let verdicts: Vec<Option<RemovedDoc>> = docs
        .par_iter()
        .map(|doc| {
            let words = normalize_words(&doc.content);
            for &len in &lengths {
                if words.len() < len {
                    continue;
                }
                for (offset, window) in words.windows(len).enumerate() {
                    if let Some(src) = index.lookup(window) {
                        return Some(RemovedDoc {
                            doc_id: doc.id.clone(),
                            benchmark: index.manifest[src as usize].name.clone(),
                            word_offset: offset,
                        });
                    }
                }
            }
            None
        })
        .collect();

    let mut report = ScrubReport::default();
    for (doc, verdict) in docs.iter().zip(verdicts) {
        match verdict {
            Some(removed) => report.removed.push(removed),
            None => {
                report.kept.insert(doc.id.clone());
            }
        }
    }
    report
}
