//! Exact and near deduplication at file and repository level.
//!
//! Exact dedup groups byte-identical contents by SHA-256 and collapses each
//! group first; near dedup then runs MinHash/LSH over the survivors. Survivor
//! choice is always the lexicographically smallest id, so the kept set does
//! not depend on input order.

pub mod lsh;
pub mod minhash;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{CodeDocument, DocId};
use crate::error::{Error, Result};

pub use lsh::{near_dedup, LshParams};
pub use minhash::{estimate_jaccard, shingle_set, MinHashConfig, MinHashSignature, Signer};

/// Standard SHA-256 of the document content bytes.
pub fn content_hash(doc: &CodeDocument) -> [u8; 32] {
    content_hash_bytes(doc.content.as_bytes())
}

pub fn content_hash_bytes(bytes: &[u8]) -> [u8; 32] {
    Sha256::digest(bytes).into()
}

pub fn content_hash_hex(doc: &CodeDocument) -> String {
    let mut out = String::with_capacity(64);
    for b in content_hash(doc) {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Outcome of a dedup pass.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DedupReport {
    /// Groups of ids sharing a content hash (only groups of size >= 2).
    pub exact_groups: Vec<Vec<DocId>>,
    /// Confirmed near-duplicate pairs with their estimated Jaccard.
    pub near_pairs: Vec<(DocId, DocId, f64)>,
    pub kept: BTreeSet<DocId>,
    /// Dropped ids with drop reasons.
    pub dropped: BTreeMap<DocId, String>,
}

impl DedupReport {
    /// kept and dropped must partition the input and every exact group keeps
    /// exactly one survivor.
    pub fn validate(&self, input_ids: &BTreeSet<DocId>) -> Result<()> {
        let dropped_ids: BTreeSet<DocId> = self.dropped.keys().cloned().collect();
        if !self.kept.is_disjoint(&dropped_ids) {
            return Err(Error::invalid("kept and dropped sets overlap"));
        }
        let mut all = self.kept.clone();
        all.extend(dropped_ids);
        if &all != input_ids {
            return Err(Error::invalid("kept ∪ dropped != input id set"));
        }
        for group in &self.exact_groups {
            let survivors = group.iter().filter(|id| self.kept.contains(*id)).count();
            if survivors != 1 {
                return Err(Error::invalid(format!(
                    "exact group has {survivors} survivors, expected exactly 1"
                )));
            }
        }
        Ok(())
    }

    fn merge_dropped_from(&mut self, other: DedupReport) {
        self.near_pairs.extend(other.near_pairs);
        for (id, reason) in other.dropped {
            self.kept.remove(&id);
            self.dropped.insert(id, reason);
        }
    }
}

/// Exact deduplication: one survivor (smallest id) per identical-content
/// group.
pub fn exact_dedup(docs: &[CodeDocument]) -> DedupReport {
    let mut by_hash: HashMap<[u8; 32], Vec<&CodeDocument>> = HashMap::new();
    for doc in docs {
        by_hash.entry(content_hash(doc)).or_default().push(doc);
    }
    let mut report = DedupReport::default();
    let mut groups: Vec<Vec<DocId>> = Vec::new();
    for members in by_hash.values() {
        let mut ids: Vec<DocId> = members.iter().map(|d| d.id.clone()).collect();
        ids.sort();
        let survivor = ids[0].clone();
        report.kept.insert(survivor.clone());
        for id in ids.iter().skip(1) {
            report
                .dropped
                .insert(id.clone(), format!("exact duplicate of {survivor}"));
        }
        if ids.len() > 1 {
            groups.push(ids);
        }
    }
    groups.sort();
    report.exact_groups = groups;
    report
}

/// Full file-level dedup: exact groups collapse first, then MinHash/LSH near
/// dedup runs over the exact survivors.
pub fn dedup_corpus(
    docs: &[CodeDocument],
    minhash: &MinHashConfig,
    lsh: &LshParams,
) -> Result<DedupReport> {
    let mut report = exact_dedup(docs);
    let survivors: Vec<&CodeDocument> = docs
        .iter()
        .filter(|d| report.kept.contains(&d.id))
        .collect();
    let signer = Signer::new(*minhash)?;
    let sigs: Vec<MinHashSignature> = {
        use rayon::prelude::*;
        survivors.par_iter().map(|d| signer.sign(d)).collect()
    };
    let near = near_dedup(&sigs, lsh)?;
    report.merge_dropped_from(near);
    let input_ids: BTreeSet<DocId> = docs.iter().map(|d| d.id.clone()).collect();
    report.validate(&input_ids)?;
    Ok(report)
}

/// Repository-level dedup. A repo's signature is the MinHash over the union
/// of its members' shingles (equivalently, the element-wise minimum of member
/// signatures); exact identity is the SHA-256 over the sorted member content
/// hashes. Clustering and survivor rules match the file level.
pub fn repo_level_dedup(
    repos: &BTreeMap<String, Vec<&CodeDocument>>,
    minhash: &MinHashConfig,
    lsh: &LshParams,
) -> Result<DedupReport> {
    for (repo_id, members) in repos {
        if members.is_empty() {
            return Err(Error::invalid(format!("repo {repo_id} has no documents")));
        }
    }

    // Exact phase over repo content digests.
    let mut by_hash: HashMap<[u8; 32], Vec<&String>> = HashMap::new();
    for (repo_id, members) in repos {
        let mut digests: Vec<[u8; 32]> = members.iter().map(|d| content_hash(d)).collect();
        digests.sort();
        let mut hasher = Sha256::new();
        for d in &digests {
            hasher.update(d);
        }
        by_hash.entry(hasher.finalize().into()).or_default().push(repo_id);
    }
    let mut report = DedupReport::default();
    let mut groups = Vec::new();
    for members in by_hash.values() {
        let mut ids: Vec<DocId> = members.iter().map(|r| DocId::new(r.as_str())).collect();
        ids.sort();
        report.kept.insert(ids[0].clone());
        for id in ids.iter().skip(1) {
            report
                .dropped
                .insert(id.clone(), format!("exact duplicate of {}", ids[0]));
        }
        if ids.len() > 1 {
            groups.push(ids);
        }
    }
    groups.sort();
    report.exact_groups = groups;

    // Near phase over union signatures of exact survivors.
    let signer = Signer::new(*minhash)?;
    let sigs: Vec<MinHashSignature> = repos
        .iter()
        .filter(|(repo_id, _)| report.kept.contains(&DocId::new(repo_id.as_str())))
        .map(|(repo_id, members)| {
            signer.sign_union(
                DocId::new(repo_id.as_str()),
                members.iter().map(|d| d.content.as_str()),
            )
        })
        .collect();
    let near = near_dedup(&sigs, lsh)?;
    report.merge_dropped_from(near);

    let input_ids: BTreeSet<DocId> = repos.keys().map(|r| DocId::new(r.as_str())).collect();
    report.validate(&input_ids)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, content: &str) -> CodeDocument {
        CodeDocument::new(id, format!("{id}.txt"), content)
    }

    #[test]
    fn identical_contents_share_a_digest() {
        let a = doc("a", "same bytes");
        let b = doc("b", "same bytes");
        assert_eq!(content_hash(&a), content_hash(&b));
    }

    #[test]
    fn single_byte_difference_changes_the_digest() {
        let a = doc("a", "same bytes");
        let b = doc("b", "same bytez");
        assert_ne!(content_hash(&a), content_hash(&b));
    }

    #[test]
    fn sha256_matches_reference_vectors() {
        // Frozen reference digests (FIPS 180-2 test vectors).
        let empty = doc("e", "");
        assert_eq!(
            content_hash_hex(&empty),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        let abc = doc("abc", "abc");
        assert_eq!(
            content_hash_hex(&abc),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn exact_dedup_keeps_smallest_id() {
        let docs = vec![doc("z", "dup"), doc("a", "dup"), doc("m", "unique")];
        let report = exact_dedup(&docs);
        assert!(report.kept.contains(&DocId::new("a")));
        assert!(report.dropped.contains_key(&DocId::new("z")));
        assert_eq!(report.exact_groups, vec![vec![DocId::new("a"), DocId::new("z")]]);
    }

    #[test]
    fn dedup_is_idempotent() {
        let text = "shared text shared text shared text shared text shared text one two three";
        let docs = vec![
            doc("a", text),
            doc("b", text),
            doc("c", "other material entirely different from the rest by far with words"),
        ];
        let minhash = MinHashConfig::default();
        let lsh = LshParams::default();
        let first = dedup_corpus(&docs, &minhash, &lsh).unwrap();
        let survivors: Vec<CodeDocument> = docs
            .iter()
            .filter(|d| first.kept.contains(&d.id))
            .cloned()
            .collect();
        let second = dedup_corpus(&survivors, &minhash, &lsh).unwrap();
        assert!(second.dropped.is_empty(), "second pass must drop nothing new");
        assert_eq!(second.kept, first.kept);
    }

    #[test]
    fn kept_set_is_invariant_under_permutation() {
        let mk = |ids: &[&str]| -> Vec<CodeDocument> {
            ids.iter()
                .map(|id| {
                    doc(
                        id,
                        if id.len() == 1 {
                            "common shared body text common shared body text common shared body"
                        } else {
                            "different words for the unique one with extra padding tokens here"
                        },
                    )
                })
                .collect()
        };
        let minhash = MinHashConfig::default();
        let lsh = LshParams::default();
        let forward = dedup_corpus(&mk(&["a", "b", "cc", "d"]), &minhash, &lsh).unwrap();
        let backward = dedup_corpus(&mk(&["d", "cc", "b", "a"]), &minhash, &lsh).unwrap();
        assert_eq!(forward.kept, backward.kept);
    }

    #[test]
    fn repo_level_identical_file_sets_collapse() {
        let a1 = doc("r1/f1", "alpha beta gamma delta epsilon zeta eta theta iota kappa");
        let a2 = doc("r1/f2", "one two three four five six seven eight nine ten eleven");
        let b1 = doc("r2/f1", "alpha beta gamma delta epsilon zeta eta theta iota kappa");
        let b2 = doc("r2/f2", "one two three four five six seven eight nine ten eleven");
        let c = doc("r3/f1", "totally disjoint material plus some more unrelated words here");
        let mut repos: BTreeMap<String, Vec<&CodeDocument>> = BTreeMap::new();
        repos.insert("repo-a".into(), vec![&a1, &a2]);
        repos.insert("repo-b".into(), vec![&b1, &b2]);
        repos.insert("repo-c".into(), vec![&c]);

        let report =
            repo_level_dedup(&repos, &MinHashConfig::default(), &LshParams::default()).unwrap();
        assert!(report.kept.contains(&DocId::new("repo-a")));
        assert!(report.dropped.contains_key(&DocId::new("repo-b")));
        assert!(report.kept.contains(&DocId::new("repo-c")));
    }

    #[test]
    fn disjoint_repos_produce_no_pairs() {
        let a = doc("x", "alpha beta gamma delta epsilon zeta eta theta iota kappa lambda mu");
        let b = doc("y", "uno dos tres cuatro cinco seis siete ocho nueve diez once doce");
        let mut repos: BTreeMap<String, Vec<&CodeDocument>> = BTreeMap::new();
        repos.insert("ra".into(), vec![&a]);
        repos.insert("rb".into(), vec![&b]);
        let report =
            repo_level_dedup(&repos, &MinHashConfig::default(), &LshParams::default()).unwrap();
        assert!(report.near_pairs.is_empty());
        assert_eq!(report.kept.len(), 2);
    }
}
