//! Fill-in-the-middle sample generation.
//!
//! Splitting is character-level: the two cut indices are drawn uniformly
//! over ordered pairs (i <= j), so empty prefixes, middles, and suffixes all
//! occur. Serialization uses plain sentinel strings; a document already
//! containing a sentinel is emitted verbatim and flagged rather than
//! corrupted. Per-document RNG streams are derived from (seed, doc id), so
//! output is independent of scheduling order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CodeDocument, DocId};
use crate::error::{Error, Result};
use crate::hashing::hash64;

pub const FIM_SUFFIX: &str = "<[fim-suffix]>";
pub const FIM_PREFIX: &str = "<[fim-prefix]>";
pub const FIM_MIDDLE: &str = "<[fim-middle]>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FimMode {
    /// Suffix-Prefix-Middle (the default).
    Spm,
    /// Prefix-Suffix-Middle, kept for comparison runs.
    Psm,
}

impl std::str::FromStr for FimMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spm" => Ok(FimMode::Spm),
            "psm" => Ok(FimMode::Psm),
            other => Err(Error::config(format!("unknown FIM mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FimSample {
    pub prefix: String,
    pub middle: String,
    pub suffix: String,
    pub serialized: String,
}

/// Splits content at two char indices 0 <= i <= j <= len drawn uniformly
/// over ordered pairs.
pub fn split_fim(content: &str, rng: &mut impl Rng) -> (String, String, String) {
    let boundaries: Vec<usize> = content
        .char_indices()
        .map(|(b, _)| b)
        .chain(std::iter::once(content.len()))
        .collect();
    let m = boundaries.len() as u64; // len + 1 cut positions
    let total = m * (m + 1) / 2;
    let r = rng.gen_range(0..total);
    let (i, j) = triangular_pair(r, m);
    let (bi, bj) = (boundaries[i as usize], boundaries[j as usize]);
    (
        content[..bi].to_string(),
        content[bi..bj].to_string(),
        content[bj..].to_string(),
    )
}

/// Decodes a flat index in 0..m(m+1)/2 into the ordered pair (i, j) with
/// 0 <= i <= j < m, row-major: row i holds the (m - i) pairs (i, i..m).
fn triangular_pair(r: u64, m: u64) -> (u64, u64) {
    let offset = |i: u64| i * (2 * m - i + 1) / 2;
    // Closed-form row estimate, then local fixup for float error.
    let fm = (2 * m + 1) as f64;
    let mut i = ((fm - (fm * fm - 8.0 * r as f64).max(0.0).sqrt()) / 2.0).floor() as u64;
    i = i.min(m - 1);
    while offset(i) > r {
        i -= 1;
    }
    while i + 1 < m && offset(i + 1) <= r {
        i += 1;
    }
    let j = i + (r - offset(i));
    (i, j)
}

pub fn contains_sentinel(content: &str) -> bool {
    content.contains(FIM_SUFFIX) || content.contains(FIM_PREFIX) || content.contains(FIM_MIDDLE)
}

/// SPM layout: suffix sentinel + suffix, prefix sentinel + prefix, middle
/// sentinel + middle.
pub fn serialize_spm(prefix: &str, middle: &str, suffix: &str) -> String {
    format!("{FIM_SUFFIX}{suffix}{FIM_PREFIX}{prefix}{FIM_MIDDLE}{middle}")
}

/// PSM layout, for comparison runs.
pub fn serialize_psm(prefix: &str, middle: &str, suffix: &str) -> String {
    format!("{FIM_PREFIX}{prefix}{FIM_SUFFIX}{suffix}{FIM_MIDDLE}{middle}")
}

pub fn serialize(mode: FimMode, prefix: &str, middle: &str, suffix: &str) -> String {
    match mode {
        FimMode::Spm => serialize_spm(prefix, middle, suffix),
        FimMode::Psm => serialize_psm(prefix, middle, suffix),
    }
}

/// Inverse of [`serialize`]; valid for sentinel-free segments.
pub fn deserialize(mode: FimMode, text: &str) -> Option<FimSample> {
    let (first, second) = match mode {
        FimMode::Spm => (FIM_SUFFIX, FIM_PREFIX),
        FimMode::Psm => (FIM_PREFIX, FIM_SUFFIX),
    };
    let rest = text.strip_prefix(first)?;
    let (seg1, rest) = rest.split_once(second)?;
    let (seg2, middle) = rest.split_once(FIM_MIDDLE)?;
    let (prefix, suffix) = match mode {
        FimMode::Spm => (seg2, seg1),
        FimMode::Psm => (seg1, seg2),
    };
    Some(FimSample {
        prefix: prefix.to_string(),
        middle: middle.to_string(),
        suffix: suffix.to_string(),
        serialized: text.to_string(),
    })
}

/// How one document left the emitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmitKind {
    Fim,
    Plain,
    /// Selected for FIM but skipped because the content already contains a
    /// sentinel string.
    SentinelSkip,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainingText {
    pub doc_id: DocId,
    pub kind: EmitKind,
    pub text: String,
}

/// Emits the training stream: each document is independently
/// FIM-transformed with probability `fim_ratio`, otherwise passed through
/// verbatim. Fixed seed means an identical stream.
pub fn emit_corpus(
    docs: &[CodeDocument],
    fim_ratio: f64,
    mode: FimMode,
    seed: u64,
) -> Result<Vec<TrainingText>> {
    if !(0.0..=1.0).contains(&fim_ratio) {
        return Err(Error::config(format!("fim ratio must be in [0,1], got {fim_ratio}")));
    }
    Ok(docs
        .par_iter()
        .map(|doc| {
            let mut rng = ChaCha8Rng::seed_from_u64(hash64(doc.id.as_str().as_bytes(), seed));
            let take_fim = rng.gen_range(0.0..1.0) < fim_ratio;
            if !take_fim {
                return TrainingText {
                    doc_id: doc.id.clone(),
                    kind: EmitKind::Plain,
                    text: doc.content.clone(),
                };
            }
            if contains_sentinel(&doc.content) {
                log::warn!("document {} contains a FIM sentinel; emitting plain", doc.id);
                return TrainingText {
                    doc_id: doc.id.clone(),
                    kind: EmitKind::SentinelSkip,
                    text: doc.content.clone(),
                };
            }
            let (prefix, middle, suffix) = split_fim(&doc.content, &mut rng);
            TrainingText {
                doc_id: doc.id.clone(),
                kind: EmitKind::Fim,
                text: serialize(mode, &prefix, &middle, &suffix),
            }
        })
        .collect())
}
