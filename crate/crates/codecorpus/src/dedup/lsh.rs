//! LSH banding and near-duplicate clustering over MinHash signatures.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::DocId;
use crate::dedup::minhash::{estimate_jaccard, MinHashSignature};
use crate::dedup::DedupReport;
use crate::error::{Error, Result};
use crate::hashing::hash64;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LshParams {
    /// Estimated-Jaccard threshold for reporting a pair.
    pub threshold: f64,
    pub bands: usize,
    pub rows: usize,
}

impl Default for LshParams {
    fn default() -> Self {
        LshParams {
            threshold: 0.85,
            bands: 16,
            rows: 16,
        }
    }
}

/// Near-deduplication: banding produces candidate pairs, the signature
/// estimate confirms them, and connected components pick one survivor each
/// (the lexicographically smallest id).
pub fn near_dedup(sigs: &[MinHashSignature], params: &LshParams) -> Result<DedupReport> {
    let mut report = DedupReport::default();
    if sigs.is_empty() {
        return Ok(report);
    }
    let k = sigs[0].values.len();
    if params.bands * params.rows != k {
        return Err(Error::config(format!(
            "bands ({}) x rows ({}) must equal signature length ({k})",
            params.bands, params.rows
        )));
    }
    for sig in sigs {
        if sig.values.len() != k {
            return Err(Error::config(format!(
                "inconsistent signature length for {}: {} vs {k}",
                sig.doc_id,
                sig.values.len()
            )));
        }
    }

    // Banding: documents sharing any band bucket become candidates.
    let mut candidates: HashSet<(usize, usize)> = HashSet::new();
    for band in 0..params.bands {
        let start = band * params.rows;
        let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
        for (idx, sig) in sigs.iter().enumerate() {
            let slice = &sig.values[start..start + params.rows];
            let mut bytes = Vec::with_capacity(params.rows * 8);
            for v in slice {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
            buckets.entry(hash64(&bytes, band as u64)).or_default().push(idx);
        }
        for members in buckets.values() {
            for i in 0..members.len() {
                for j in (i + 1)..members.len() {
                    let (a, b) = (members[i].min(members[j]), members[i].max(members[j]));
                    candidates.insert((a, b));
                }
            }
        }
    }

    // Confirm candidates and cluster with union-find.
    let mut parent: Vec<usize> = (0..sigs.len()).collect();
    let mut pairs: Vec<(DocId, DocId, f64)> = Vec::new();
    let mut confirmed: Vec<(usize, usize)> = Vec::new();
    for (a, b) in candidates {
        let est = estimate_jaccard(&sigs[a], &sigs[b])?;
        if est >= params.threshold {
            let (x, y) = if sigs[a].doc_id <= sigs[b].doc_id {
                (a, b)
            } else {
                (b, a)
            };
            pairs.push((sigs[x].doc_id.clone(), sigs[y].doc_id.clone(), est));
            confirmed.push((a, b));
        }
    }
    for (a, b) in confirmed {
        union(&mut parent, a, b);
    }
    pairs.sort_by(|l, r| (&l.0, &l.1).cmp(&(&r.0, &r.1)));
    report.near_pairs = pairs;

    // Survivor per cluster: smallest id.
    let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for idx in 0..sigs.len() {
        clusters.entry(find(&mut parent, idx)).or_default().push(idx);
    }
    for members in clusters.values() {
        let survivor = members
            .iter()
            .min_by(|&&a, &&b| sigs[a].doc_id.cmp(&sigs[b].doc_id))
            .copied()
            .expect("cluster is non-empty");
        report.kept.insert(sigs[survivor].doc_id.clone());
        for &m in members {
            if m != survivor {
                report.dropped.insert(
                    sigs[m].doc_id.clone(),
                    format!("near-duplicate of {}", sigs[survivor].doc_id),
                );
            }
        }
    }
    Ok(report)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        parent[hi] = lo;
    }
}

/// All ids from a signature list, as a sorted set.
pub fn signature_ids(sigs: &[MinHashSignature]) -> BTreeSet<DocId> {
    sigs.iter().map(|s| s.doc_id.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dedup::minhash::{MinHashConfig, Signer};

    fn sigs_for(texts: &[(&str, &str)]) -> Vec<MinHashSignature> {
        let signer = Signer::new(MinHashConfig::default()).unwrap();
        texts
            .iter()
            .map(|(id, text)| signer.sign_content(DocId::new(*id), text))
            .collect()
    }

    #[test]
    fn planted_exact_duplicate_is_reported_with_one_survivor() {
        let body = "a long enough body of text with plenty of repeated structure \
                    so shingles exist one two three four five six seven eight";
        let sigs = sigs_for(&[("doc-b", body), ("doc-a", body), ("doc-c", "entirely different content about other things with many extra words")]);
        let report = near_dedup(&sigs, &LshParams::default()).unwrap();
        assert_eq!(report.near_pairs.len(), 1);
        assert!((report.near_pairs[0].2 - 1.0).abs() < 1e-9);
        assert!(report.kept.contains(&DocId::new("doc-a")));
        assert!(report.dropped.contains_key(&DocId::new("doc-b")));
        assert!(report.kept.contains(&DocId::new("doc-c")));
    }

    #[test]
    fn empty_corpus_empty_report() {
        let report = near_dedup(&[], &LshParams::default()).unwrap();
        assert!(report.kept.is_empty() && report.dropped.is_empty());
        assert!(report.near_pairs.is_empty());
    }

    #[test]
    fn bands_times_rows_must_match_k() {
        let sigs = sigs_for(&[("a", "one two three four five six seven")]);
        let bad = LshParams { threshold: 0.8, bands: 10, rows: 10 };
        assert!(near_dedup(&sigs, &bad).is_err());
    }

    #[test]
    fn kept_and_dropped_partition_the_input() {
        let sigs = sigs_for(&[
            ("a", "the quick brown fox jumps over the lazy dog again and again today"),
            ("b", "the quick brown fox jumps over the lazy dog again and again today"),
            ("c", "completely unrelated words describing some other domain entirely here"),
        ]);
        let report = near_dedup(&sigs, &LshParams::default()).unwrap();
        let mut all: BTreeSet<DocId> = report.kept.clone();
        all.extend(report.dropped.keys().cloned());
        assert_eq!(all, signature_ids(&sigs));
        assert!(report.kept.is_disjoint(&report.dropped.keys().cloned().collect()));
    }
}
