//! Okapi BM25 ranking of snapshot files against a commit message.
//!
//! Parameters k1 = 1.2, b = 0.75, IDF = ln((N - n + 0.5)/(n + 0.5) + 1).
//! Tokenization is whitespace splitting plus lowercasing; each distinct
//! query term contributes once.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

pub const BM25_K1: f64 = 1.2;
pub const BM25_B: f64 = 0.75;

fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(|t| t.to_lowercase()).collect()
}

/// Scores `files` (path, content) against the query and returns the top-k as
/// (path, score), descending by score with ties broken by path.
pub fn bm25_rank(query: &str, files: &[(String, String)], k: usize) -> Result<Vec<(String, f64)>> {
    if k == 0 {
        return Err(Error::config("bm25 k must be >= 1"));
    }
    if files.is_empty() {
        return Ok(Vec::new());
    }
    let query_terms: HashSet<String> = tokenize(query).into_iter().collect();
    let docs: Vec<Vec<String>> = files.iter().map(|(_, c)| tokenize(c)).collect();
    let n_docs = docs.len() as f64;
    let avgdl = docs.iter().map(|d| d.len() as f64).sum::<f64>() / n_docs;

    // Document frequency per query term.
    let mut df: HashMap<&str, f64> = HashMap::new();
    for term in &query_terms {
        let count = docs.iter().filter(|d| d.iter().any(|t| t == term)).count();
        df.insert(term, count as f64);
    }

    let mut scored: Vec<(String, f64)> = files
        .iter()
        .zip(&docs)
        .map(|((path, _), tokens)| {
            let dl = tokens.len() as f64;
            let mut score = 0.0;
            for term in &query_terms {
                let tf = tokens.iter().filter(|t| *t == term).count() as f64;
                if tf == 0.0 {
                    continue;
                }
                let n = df[term.as_str()];
                let idf = ((n_docs - n + 0.5) / (n + 0.5) + 1.0).ln();
                let denom = tf + BM25_K1 * (1.0 - BM25_B + BM25_B * dl / avgdl);
                score += idf * tf * (BM25_K1 + 1.0) / denom;
            }
            (path.clone(), score)
        })
        .collect();

    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    scored.truncate(k);
    Ok(scored)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus() -> Vec<(String, String)> {
        vec![
            ("a.py".to_string(), "parser error handling code".to_string()),
            ("b.py".to_string(), "parser parser table".to_string()),
            ("c.py".to_string(), "unrelated words here".to_string()),
        ]
    }

    #[test]
    fn scores_match_a_hand_evaluated_okapi_computation() {
        // Query "parser error" over the 3-doc corpus, evaluated by hand:
        //   N = 3, avgdl = (4 + 3 + 3)/3 = 10/3
        //   df(parser) = 2 -> idf = ln(1.5/2.5 + 1) = ln(1.6)
        //   df(error)  = 1 -> idf = ln(2.5/1.5 + 1) = ln(8/3)
        let avgdl = 10.0 / 3.0;
        let idf_parser = (1.5f64 / 2.5 + 1.0).ln();
        let idf_error = (2.5f64 / 1.5 + 1.0).ln();

        // a.py: dl=4, tf(parser)=tf(error)=1.
        let denom_a = 1.0 + 1.2 * (1.0 - 0.75 + 0.75 * 4.0 / avgdl);
        let expect_a = idf_parser * 2.2 / denom_a + idf_error * 2.2 / denom_a;
        // b.py: dl=3, tf(parser)=2.
        let denom_b = 2.0 + 1.2 * (1.0 - 0.75 + 0.75 * 3.0 / avgdl);
        let expect_b = idf_parser * 2.0 * 2.2 / denom_b;

        let ranked = bm25_rank("parser error", &corpus(), 10).unwrap();
        let score_of = |p: &str| ranked.iter().find(|(path, _)| path == p).unwrap().1;
        assert!((score_of("a.py") - expect_a).abs() < 1e-9);
        assert!((score_of("b.py") - expect_b).abs() < 1e-9);
        assert!((score_of("c.py") - 0.0).abs() < 1e-9);
    }

    #[test]
    fn docs_with_query_terms_outrank_docs_without() {
        let ranked = bm25_rank("parser error", &corpus(), 3).unwrap();
        assert_eq!(ranked[0].0, "a.py");
        assert_eq!(ranked.last().unwrap().0, "c.py");
    }

    #[test]
    fn k_larger_than_corpus_returns_everything() {
        let ranked = bm25_rank("parser", &corpus(), 5).unwrap();
        assert_eq!(ranked.len(), 3);
    }

    #[test]
    fn empty_file_list_is_empty_result() {
        assert!(bm25_rank("anything", &[], 5).unwrap().is_empty());
    }

    #[test]
    fn ties_break_by_path() {
        let files = vec![
            ("z.py".to_string(), "shared words".to_string()),
            ("a.py".to_string(), "shared words".to_string()),
        ];
        let ranked = bm25_rank("shared", &files, 2).unwrap();
        assert_eq!(ranked[0].0, "a.py");
        assert_eq!(ranked[1].0, "z.py");
    }

    #[test]
    fn agrees_with_brute_force_on_random_corpora() {
        // Second, structurally independent computation of the same formula.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let vocab = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta"];
        for _ in 0..20 {
            let files: Vec<(String, String)> = (0..6)
                .map(|i| {
                    let len = rng.gen_range(1..12);
                    let words: Vec<&str> =
                        (0..len).map(|_| vocab[rng.gen_range(0..vocab.len())]).collect();
                    (format!("f{i}"), words.join(" "))
                })
                .collect();
            let query = format!(
                "{} {}",
                vocab[rng.gen_range(0..vocab.len())],
                vocab[rng.gen_range(0..vocab.len())]
            );
            let ranked = bm25_rank(&query, &files, files.len()).unwrap();

            let total_len: usize = files.iter().map(|(_, c)| c.split_whitespace().count()).sum();
            let avgdl = total_len as f64 / files.len() as f64;
            let qterms: HashSet<&str> = query.split_whitespace().collect();
            for (path, got) in &ranked {
                let content = &files.iter().find(|(p, _)| p == path).unwrap().1;
                let toks: Vec<&str> = content.split_whitespace().collect();
                let mut want = 0.0;
                for term in &qterms {
                    let tf = toks.iter().filter(|t| *t == term).count() as f64;
                    if tf == 0.0 {
                        continue;
                    }
                    let df = files
                        .iter()
                        .filter(|(_, c)| c.split_whitespace().any(|t| t == *term))
                        .count() as f64;
                    let idf = ((files.len() as f64 - df + 0.5) / (df + 0.5) + 1.0).ln();
                    want += idf * tf * 2.2
                        / (tf + 1.2 * (0.25 + 0.75 * toks.len() as f64 / avgdl));
                }
                assert!((got - want).abs() < 1e-9, "{path}: {got} vs {want}");
            }
        }
    }
}
