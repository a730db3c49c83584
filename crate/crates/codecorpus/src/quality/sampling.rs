//! Default stratified-sampling plan for assembling labeling sets.
//!
//! The per-language file counts below are the labeling-set distribution the
//! scorer defaults were calibrated against; they are normalized to
//! proportions and applied to whatever languages the candidate pool actually
//! contains.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{CodeDocument, DocId};
use crate::hashing::derive_seed;

/// (language, file count) of the default labeling plan. Total: 222,066.
pub const LABELING_PLAN: &[(&str, u32)] = &[
    ("Python", 26_924),
    ("Shell", 10_194),
    ("Ruby", 10_187),
    ("Go", 10_185),
    ("TypeScript", 10_179),
    ("MATLAB", 10_165),
    ("Java", 10_161),
    ("C#", 10_112),
    ("SQL", 10_110),
    ("JavaScript", 10_110),
    ("CSS", 10_053),
    ("Kotlin", 10_051),
    ("PHP", 10_049),
    ("C", 10_020),
    ("reStructuredText", 9_951),
    ("C++", 9_938),
    ("HTML", 9_422),
    ("R", 9_379),
    ("TeX", 9_156),
    ("Markdown", 8_845),
    ("RMarkdown", 6_875),
];

pub fn plan_total() -> u64 {
    LABELING_PLAN.iter().map(|(_, c)| u64::from(*c)).sum()
}

/// The plan as proportions summing to 1.
pub fn plan_proportions() -> Vec<(&'static str, f64)> {
    let total = plan_total() as f64;
    LABELING_PLAN
        .iter()
        .map(|(lang, count)| (*lang, f64::from(*count) / total))
        .collect()
}

/// Allocates `target_total` labeling slots across the plan languages present
/// in `available` (language -> pool size). Weights are renormalized over the
/// present languages, rounded by largest remainder, and capped at
/// availability with the excess redistributed.
pub fn allocate_sample(
    available: &BTreeMap<String, usize>,
    target_total: usize,
) -> BTreeMap<String, usize> {
    let mut weights: Vec<(&str, f64, usize)> = LABELING_PLAN
        .iter()
        .filter_map(|(lang, count)| {
            available
                .get(*lang)
                .filter(|n| **n > 0)
                .map(|n| (*lang, f64::from(*count), *n))
        })
        .collect();
    let mut out: BTreeMap<String, usize> = BTreeMap::new();
    let mut remaining = target_total;

    // Capped languages leave the pool and their share is re-spread until the
    // allocation stabilizes.
    while remaining > 0 && !weights.is_empty() {
        let total_w: f64 = weights.iter().map(|(_, w, _)| w).sum();
        let mut quotas: Vec<(usize, usize, f64)> = weights
            .iter()
            .enumerate()
            .map(|(i, (_, w, _))| {
                let exact = remaining as f64 * w / total_w;
                (i, exact.floor() as usize, exact - exact.floor())
            })
            .collect();
        let assigned: usize = quotas.iter().map(|(_, q, _)| q).sum();
        let mut leftover = remaining - assigned;
        quotas.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then(a.0.cmp(&b.0)));
        for q in quotas.iter_mut() {
            if leftover == 0 {
                break;
            }
            q.1 += 1;
            leftover -= 1;
        }

        let mut next_weights = Vec::new();
        let mut used = 0;
        let mut any_capped = false;
        for (i, quota, _) in quotas {
            let (lang, w, avail) = weights[i];
            let take = quota.min(avail);
            if take > 0 {
                *out.entry(lang.to_string()).or_insert(0) += take;
                used += take;
            }
            if quota >= avail {
                any_capped = true;
            } else {
                next_weights.push((lang, w, avail - take));
            }
        }
        remaining -= used;
        weights = next_weights;
        if !any_capped && remaining > 0 {
            // Rounding left nothing to hand out; stop rather than loop.
            break;
        }
        if used == 0 {
            break;
        }
    }
    out
}

/// Selects a stratified labeling set from a pool of documents, seeded and
/// deterministic. Returns the chosen ids, sorted.
pub fn stratified_sample(docs: &[CodeDocument], target_total: usize, seed: u64) -> Vec<DocId> {
    let mut by_lang: BTreeMap<String, Vec<&CodeDocument>> = BTreeMap::new();
    for doc in docs {
        by_lang.entry(doc.language.clone()).or_default().push(doc);
    }
    let available: BTreeMap<String, usize> =
        by_lang.iter().map(|(l, v)| (l.clone(), v.len())).collect();
    let allocation = allocate_sample(&available, target_total);

    let mut chosen = Vec::new();
    for (lang, quota) in allocation {
        let mut pool = by_lang.remove(&lang).unwrap_or_default();
        pool.sort_by(|a, b| a.id.cmp(&b.id));
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &lang));
        pool.shuffle(&mut rng);
        chosen.extend(pool.into_iter().take(quota).map(|d| d.id.clone()));
    }
    chosen.sort();
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_matches_the_published_distribution() {
        assert_eq!(LABELING_PLAN.len(), 21);
        assert_eq!(plan_total(), 222_066);
        let props = plan_proportions();
        let sum: f64 = props.iter().map(|(_, p)| p).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert_eq!(props[0].0, "Python");
        assert!(props.iter().all(|(_, p)| *p > 0.0));
    }

    #[test]
    fn allocation_respects_proportions_and_total() {
        let mut available = BTreeMap::new();
        for (lang, _) in LABELING_PLAN {
            available.insert(lang.to_string(), 10_000usize);
        }
        let alloc = allocate_sample(&available, 1000);
        let total: usize = alloc.values().sum();
        assert_eq!(total, 1000);
        // Python carries 26924/222066 ≈ 12.1% of the plan.
        let python = alloc["Python"];
        assert!((115..=128).contains(&python), "python quota {python}");
    }

    #[test]
    fn allocation_caps_at_availability() {
        let mut available = BTreeMap::new();
        available.insert("Python".to_string(), 3usize);
        available.insert("Shell".to_string(), 1000usize);
        let alloc = allocate_sample(&available, 100);
        assert_eq!(alloc["Python"], 3);
        assert_eq!(alloc["Shell"], 97);
    }

    #[test]
    fn non_plan_languages_are_ignored() {
        let mut available = BTreeMap::new();
        available.insert("Brainfuck".to_string(), 50usize);
        let alloc = allocate_sample(&available, 10);
        assert!(alloc.is_empty());
    }

    #[test]
    fn stratified_sample_is_deterministic() {
        let docs: Vec<CodeDocument> = (0..50)
            .map(|i| {
                let ext = if i % 2 == 0 { "py" } else { "sh" };
                CodeDocument::new(format!("d{i:02}"), format!("f{i}.{ext}"), "content words")
            })
            .collect();
        let a = stratified_sample(&docs, 10, 42);
        let b = stratified_sample(&docs, 10, 42);
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        let c = stratified_sample(&docs, 10, 43);
        assert_ne!(a, c, "different seed should pick a different set");
    }
}
