//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS line when it holds (run with `cargo test --test acceptance --
//! --nocapture` to see them). Oracles here are independent brute-force
//! recomputations, never the implementation under test.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use codecorpus::corpus::{CodeDocument, DocId};
use codecorpus::decontam;
use codecorpus::dedup::{self, LshParams, MinHashConfig, Signer};

use codecorpus::fim;
use codecorpus::needle;
use codecorpus::pack;
use codecorpus::pipeline::{self, PipelineConfig, StageConfig};
use codecorpus::quality;
use codecorpus::recall;

fn pass(n: u32, what: &str) {
    println!("acceptance {n:02} PASS - {what}");
}

// ---------------------------------------------------------------- criterion 1

/// Explicit word 5-gram shingle set, built independently of the library.
fn oracle_shingles(text: &str) -> HashSet<String> {
    let toks: Vec<String> = text.split_whitespace().map(|t| t.to_lowercase()).collect();
    if toks.len() < 5 {
        return [toks.join(" ")].into_iter().collect();
    }
    toks.windows(5).map(|w| w.join(" ")).collect()
}

fn oracle_jaccard(a: &HashSet<String>, b: &HashSet<String>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.union(b).count();
    inter as f64 / union as f64
}

/// 1,000-doc corpus with planted exact copies and near-duplicates.
fn planted_corpus(seed: u64) -> (Vec<CodeDocument>, Vec<(String, String)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab: Vec<String> = (0..5000).map(|i| format!("tok{i}")).collect();
    let mut docs = Vec::new();
    let mut exact_copies = Vec::new();

    let base_count = 760;
    let mut bases: Vec<Vec<String>> = Vec::new();
    for i in 0..base_count {
        let len = rng.gen_range(130..170);
        let words: Vec<String> = (0..len)
            .map(|_| vocab.choose(&mut rng).unwrap().clone())
            .collect();
        docs.push(CodeDocument::new(
            format!("base-{i:04}"),
            format!("base-{i:04}.txt"),
            words.join(" "),
        ));
        bases.push(words);
    }
    // 120 byte-identical copies of the first bases.
    for (i, base) in bases.iter().take(120).enumerate() {
        let id = format!("copy-{i:04}");
        docs.push(CodeDocument::new(id.clone(), format!("{id}.txt"), base.join(" ")));
        exact_copies.push((format!("base-{i:04}"), id));
    }
    // 120 near-duplicates of the next bases, at high Jaccard.
    for i in 0..120 {
        let source = &bases[200 + i];
        let mut words = source.clone();
        match i % 3 {
            0 => {
                // One word substituted.
                let at = rng.gen_range(5..words.len() - 5);
                words[at] = "mutated".to_string();
            }
            1 => {
                // A couple of appended words.
                words.push("appended".into());
                words.push("tail".into());
            }
            _ => {
                // Trailing 5% trimmed.
                let keep = words.len() * 95 / 100;
                words.truncate(keep);
            }
        }
        docs.push(CodeDocument::new(
            format!("near-{i:04}"),
            format!("near-{i:04}.txt"),
            words.join(" "),
        ));
    }
    (docs, exact_copies)
}

#[test]
fn acceptance_01_dedup_oracle_equivalence() {
    let started = Instant::now();
    let (docs, exact_copies) = planted_corpus(1);
    assert_eq!(docs.len(), 1000);

    let minhash = MinHashConfig::default(); // k=256, w=5
    let lsh = LshParams::default(); // threshold 0.85, 16x16
    let report = dedup::dedup_corpus(&docs, &minhash, &lsh).unwrap();

    // Exact dedup removes 100% of byte-identical copies.
    for (base, copy) in &exact_copies {
        let base_id = DocId::new(base.as_str());
        let copy_id = DocId::new(copy.as_str());
        assert!(
            report.dropped.contains_key(&copy_id) || report.dropped.contains_key(&base_id),
            "copy pair ({base}, {copy}) fully survived"
        );
        assert!(
            report.kept.contains(&base_id) || report.kept.contains(&copy_id),
            "copy pair ({base}, {copy}) fully dropped"
        );
    }

    // Brute-force all-pairs exact Jaccard oracle over the exact survivors.
    let survivors: Vec<&CodeDocument> =
        docs.iter().filter(|d| !is_exact_dropped(&report, &d.id)).collect();
    let shingle_sets: Vec<HashSet<String>> =
        survivors.iter().map(|d| oracle_shingles(&d.content)).collect();
    let mut true_pairs: BTreeSet<(DocId, DocId)> = BTreeSet::new();
    for i in 0..survivors.len() {
        for j in (i + 1)..survivors.len() {
            if oracle_jaccard(&shingle_sets[i], &shingle_sets[j]) >= 0.85 {
                let (a, b) = if survivors[i].id <= survivors[j].id {
                    (survivors[i].id.clone(), survivors[j].id.clone())
                } else {
                    (survivors[j].id.clone(), survivors[i].id.clone())
                };
                true_pairs.insert((a, b));
            }
        }
    }
    assert!(
        true_pairs.len() >= 100,
        "generator must plant enough true pairs, got {}",
        true_pairs.len()
    );
    let reported: BTreeSet<(DocId, DocId)> = report
        .near_pairs
        .iter()
        .map(|(a, b, _)| (a.clone(), b.clone()))
        .collect();
    let found = true_pairs.iter().filter(|p| reported.contains(p)).count();
    let recall = found as f64 / true_pairs.len() as f64;
    assert!(recall >= 0.95, "near-dup recall {recall:.4} < 0.95 ({found}/{})", true_pairs.len());

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 30, "dedup acceptance took {elapsed:?}");
    pass(1, &format!("dedup recall {recall:.3} over {} true pairs in {elapsed:.2?}", true_pairs.len()));
}

fn is_exact_dropped(report: &dedup::DedupReport, id: &DocId) -> bool {
    report
        .dropped
        .get(id)
        .map(|reason| reason.starts_with("exact"))
        .unwrap_or(false)
}

// ---------------------------------------------------------------- criterion 2

#[test]
fn acceptance_02_minhash_estimator_error() {
    let signer = Signer::new(MinHashConfig { k: 256, shingle_w: 5, seed: 21 }).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let vocab: Vec<String> = (0..600).map(|i| format!("w{i}")).collect();

    let mut total_err = 0.0;
    for pair in 0..50 {
        let len = rng.gen_range(90..160);
        let a: Vec<String> = (0..len).map(|_| vocab.choose(&mut rng).unwrap().clone()).collect();
        let keep = (pair * len) / 55; // sweep the overlap range
        let mut b: Vec<String> = a[..keep.min(a.len())].to_vec();
        while b.len() < len {
            b.push(vocab.choose(&mut rng).unwrap().clone());
        }
        let (a_text, b_text) = (a.join(" "), b.join(" "));
        let est = dedup::estimate_jaccard(
            &signer.sign_content(DocId::new("a"), &a_text),
            &signer.sign_content(DocId::new("b"), &b_text),
        )
        .unwrap();
        let exact = oracle_jaccard(&oracle_shingles(&a_text), &oracle_shingles(&b_text));
        total_err += (est - exact).abs();
    }
    let mean_err = total_err / 50.0;
    assert!(mean_err < 0.08, "mean |estimate - exact| = {mean_err:.4}");
    pass(2, &format!("minhash estimator mean abs error {mean_err:.4} < 0.08"));
}

// ---------------------------------------------------------------- criterion 3

#[test]
fn acceptance_03_quality_metric_formulas() {
    // The worked fixture must pass exactly.
    let fixture = vec![
        (DocId::new("f0"), 3u8, 4.0),
        (DocId::new("f1"), 7u8, 7.0),
        (DocId::new("f2"), 7u8, 5.0),
    ];
    let report = quality::eval_from_predictions(&fixture).unwrap();
    assert_eq!(report.eps_mae, 1.0);
    assert_eq!(report.eps_cmae, 1.0);

    // 20 random fixtures against a from-scratch recomputation, to 1e-12.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..20 {
        let n = rng.gen_range(5..200);
        let samples: Vec<(DocId, u8, f64)> = (0..n)
            .map(|i| {
                (DocId::new(format!("t{trial}-{i}")), rng.gen_range(0..=10u8), rng.gen_range(0.0..10.0))
            })
            .collect();
        let report = quality::eval_from_predictions(&samples).unwrap();

        let mut class_sums = [0.0f64; 11];
        let mut class_counts = [0usize; 11];
        for (_, class, pred) in &samples {
            class_sums[*class as usize] += (pred - f64::from(*class)).abs();
            class_counts[*class as usize] += 1;
        }
        let nonempty = class_counts.iter().filter(|c| **c > 0).count();
        let cmae: f64 = (0..11)
            .filter(|&i| class_counts[i] > 0)
            .map(|i| class_sums[i] / class_counts[i] as f64)
            .sum::<f64>()
            / nonempty as f64;
        let mae: f64 = class_sums.iter().sum::<f64>() / n as f64;
        assert!((report.eps_cmae - cmae).abs() <= 1e-12, "cmae mismatch on trial {trial}");
        assert!((report.eps_mae - mae).abs() <= 1e-12, "mae mismatch on trial {trial}");
    }
    pass(3, "eps_cmae / eps_mae match brute-force recomputation to 1e-12");
}

// ---------------------------------------------------------------- criterion 4

#[test]
fn acceptance_04_rating_extraction_fixture() {
    enum Want {
        Ok(u8),
        Err,
    }
    use Want::*;
    let cases: Vec<(&str, Want)> = vec![
        ("Rating: [[5]]", Ok(5)),                                     // the canonical example
        ("The code is clean and well structured.\nRating: [[8]]", Ok(8)),
        ("Rating: [[0]]", Ok(0)),                                     // zero-score policy
        ("Mostly hard-coded data. Rating: [[0]]", Ok(0)),
        ("Rating: [[10]]", Ok(10)),
        ("Rating: [[ 7 ]]", Ok(7)),
        ("Rating:   [[3]]", Ok(3)),
        ("Rating: [[2]] ... wait, reconsidering. Rating: [[6]]", Ok(6)),
        ("explanation first\n\nRating: [[9]]\n", Ok(9)),
        ("Rating: [[1]]", Ok(1)),
        ("Rating: [[4]].", Ok(4)),
        ("* Readability: fine\n* Reusability: poor\nRating: [[2]]", Ok(2)),
        ("verdict => Rating: [[5]] <= final", Ok(5)),
        ("Rating: [[05]]", Ok(5)),
        ("Rating:\t[[6]]", Ok(6)),
        ("double Rating: [[3]] Rating: [[3]]", Ok(3)),
        ("no rating given", Err),
        ("", Err),
        ("Rating: 5", Err),
        ("Rating [[5]]", Err),
        ("Rating: [5]", Err),
        ("Rating: [[]]", Err),
        ("Rating: [[eleven]]", Err),
        ("Rating: [[7.5]]", Err),
        ("Rating: [[11]]", Err),
        ("Rating: [[-3]]", Err),
        ("Rating: [[42]]", Err),
        ("score: [[5]]", Err),
        ("Rating: ((5))", Err),
        ("Rating: [[1]] then Rating: [[99]]", Err),                  // last match wins, then fails range
    ];
    assert_eq!(cases.len(), 30);
    let mut correct = 0;
    for (input, want) in &cases {
        match (quality::extract_rating(input), want) {
            (std::result::Result::Ok(got), Want::Ok(want)) if got == *want => correct += 1,
            (std::result::Result::Err(_), Want::Err) => correct += 1,
            (got, _) => panic!("case {input:?}: unexpected outcome {got:?}"),
        }
    }
    assert_eq!(correct, 30);
    pass(4, "rating extraction parses 30/30 fixture cases with no silent defaults");
}

// ---------------------------------------------------------------- criterion 5

#[test]
fn acceptance_05_percentile_filter_exact_drop() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..50 {
        let n = rng.gen_range(1..400);
        let scored: Vec<(DocId, Option<f64>)> = (0..n)
            .map(|i| (DocId::new(format!("d{i:04}")), Some(rng.gen_range(0.0..1.0))))
            .collect();
        let kept = quality::percentile_filter(&scored, 0.10).unwrap();
        let expected_drop = (n as f64 * 0.10).floor() as usize;
        assert_eq!(kept.len(), n - expected_drop, "trial {trial}, n={n}");

        // The dropped ids are exactly the lowest by (score, id).
        let mut ranked: Vec<(f64, &DocId)> =
            scored.iter().map(|(id, s)| (s.unwrap(), id)).collect();
        ranked.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(b.1)));
        for (score, id) in ranked.iter().take(expected_drop) {
            assert!(!kept.contains(id), "trial {trial}: lowest doc {id} ({score}) survived");
        }
        for (_, id) in ranked.iter().skip(expected_drop) {
            assert!(kept.contains(id));
        }
    }
    pass(5, "percentile filter drops exactly floor(n * 0.10) lowest on 50 random fixtures");
}

// ---------------------------------------------------------------- criterion 6

#[test]
fn acceptance_06_fim_reconstruction_and_ratios() {
    // Reconstruction over 100,000 samples, zero failures.
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = 0u32;
    for i in 0..100_000u32 {
        let len = (i % 257) as usize;
        let content: String = (0..len)
            .map(|_| char::from(rng.gen_range(b' '..=b'~')))
            .collect();
        let (p, m, s) = fim::split_fim(&content, &mut rng);
        if format!("{p}{m}{s}") != content {
            failures += 1;
        }
    }
    assert_eq!(failures, 0);

    // Golden SPM byte-match.
    assert_eq!(
        fim::serialize_spm("ab", "cd", "ef"),
        "<[fim-suffix]>ef<[fim-prefix]>ab<[fim-middle]>cd"
    );
    assert_eq!(
        fim::serialize_spm("", "", ""),
        "<[fim-suffix]><[fim-prefix]><[fim-middle]>"
    );

    // Corpus-level ratios over 10,000 docs.
    let docs: Vec<CodeDocument> = (0..10_000)
        .map(|i| {
            CodeDocument::new(format!("doc-{i:05}"), format!("doc{i}.py"), format!("content body {i}\n"))
        })
        .collect();
    for (ratio, tolerance) in [(0.5, 0.02), (0.1, 0.01)] {
        let out = fim::emit_corpus(&docs, ratio, fim::FimMode::Spm, 6).unwrap();
        let fim_count = out.iter().filter(|t| t.kind == fim::EmitKind::Fim).count();
        let fraction = fim_count as f64 / out.len() as f64;
        assert!(
            (fraction - ratio).abs() <= tolerance,
            "ratio {ratio}: got {fraction}"
        );
    }
    pass(6, "fim reconstruction 100k/100k, golden SPM bytes, ratios 0.5±0.02 and 0.1±0.01");
}

// ---------------------------------------------------------------- criterion 7

#[test]
fn acceptance_07_decontamination_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let vocab: Vec<String> = (0..800).map(|i| format!("bw{i}")).collect();

    // 20 benchmark items, each 14..28 words.
    let items: Vec<String> = (0..20)
        .map(|_| {
            let len = rng.gen_range(14..28);
            (0..len)
                .map(|_| vocab.choose(&mut rng).unwrap().clone())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    let benchmarks = vec![("bench".to_string(), items.clone())];
    let index = decontam::build_index(&benchmarks, 10, decontam::IndexMode::Hashed, 7).unwrap();

    // 200 docs: 40 contaminated with a verbatim 10-word span, 20 with a
    // maximal 9-word overlap, 140 clean.
    let mut docs = Vec::new();
    for i in 0..200 {
        let filler: Vec<String> = (0..30).map(|_| format!("doc{i}w{}", rng.gen_range(0..50))).collect();
        let content = if i < 40 {
            let item_words: Vec<&str> = items[i % items.len()].split(' ').collect();
            let start = rng.gen_range(0..item_words.len() - 10);
            let span = item_words[start..start + 10].join(" ");
            format!("{} {span} {}", filler[..10].join(" "), filler[10..].join(" "))
        } else if i < 60 {
            let item_words: Vec<&str> = items[i % items.len()].split(' ').collect();
            let span = item_words[..9].join(" ");
            format!("{} {span} zzdiverge{i} {}", filler[..10].join(" "), filler[10..].join(" "))
        } else {
            filler.join(" ")
        };
        docs.push(CodeDocument::new(format!("doc-{i:03}"), format!("d{i}.md"), content));
    }

    let report = decontam::scrub(&docs, &index);

    // Brute-force oracle: explicit 10-gram string-set intersection.
    let mut bench_grams: HashSet<Vec<String>> = HashSet::new();
    for item in &items {
        let words = decontam::normalize_words(item);
        for w in words.windows(10) {
            bench_grams.insert(w.to_vec());
        }
    }
    for doc in &docs {
        let words = decontam::normalize_words(&doc.content);
        let contaminated =
            words.len() >= 10 && words.windows(10).any(|w| bench_grams.contains(w));
        let removed = report.removed.iter().any(|r| r.doc_id == doc.id);
        assert_eq!(removed, contaminated, "doc {} disagrees with the oracle", doc.id);
        assert_eq!(report.kept.contains(&doc.id), !contaminated);
    }
    let removed_count = report.removed.len();
    assert_eq!(removed_count, 40, "exactly the planted docs are removed");
    pass(7, "scrub equals the brute-force 10-gram oracle on 200 docs; 9-word overlaps kept");
}

// ---------------------------------------------------------------- criterion 8

#[test]
fn acceptance_08_bm25_hand_computation() {
    let files = vec![
        ("a.py".to_string(), "parser error handling code".to_string()),
        ("b.py".to_string(), "parser parser table".to_string()),
        ("c.py".to_string(), "unrelated words here".to_string()),
    ];
    let ranked = codecorpus::commits::bm25_rank("parser error", &files, 10).unwrap();
    let score_of = |p: &str| ranked.iter().find(|(path, _)| path == p).unwrap().1;

    // Independent hand evaluation of Okapi BM25 (k1=1.2, b=0.75,
    // idf = ln((N-n+0.5)/(n+0.5)+1)).
    let avgdl = 10.0 / 3.0;
    let idf_parser = (1.5f64 / 2.5 + 1.0).ln();
    let idf_error = (2.5f64 / 1.5 + 1.0).ln();
    let denom_a = 1.0 + 1.2 * (0.25 + 0.75 * 4.0 / avgdl);
    let expect_a = (idf_parser + idf_error) * 2.2 / denom_a;
    let denom_b = 2.0 + 1.2 * (0.25 + 0.75 * 3.0 / avgdl);
    let expect_b = idf_parser * 2.0 * 2.2 / denom_b;

    assert!((score_of("a.py") - expect_a).abs() < 1e-9);
    assert!((score_of("b.py") - expect_b).abs() < 1e-9);
    assert!(score_of("c.py").abs() < 1e-9);

    // Top-5 context selection enforced on a 7-file record.
    let mut record_files = BTreeMap::new();
    for i in 0..7 {
        record_files.insert(
            format!("src/f{i}.py"),
            format!("def parse_{i}():\n    return {i}\n"),
        );
    }
    let record = codecorpus::commits::CommitRecord {
        repo_id: "r".into(),
        message: "fix parse bug".into(),
        patch: "--- a\n+++ b\n".into(),
        merge_status: false,
        snapshot: codecorpus::corpus::RepoSnapshot::default(),
        files: record_files,
        modified_paths: vec!["src/f0.py".into()],
    };
    let sample = codecorpus::commits::format_commit_sample(&record, 5).unwrap();
    assert_eq!(sample.retrieved_files.len(), 5);
    pass(8, "bm25 matches the hand-evaluated Okapi values to 1e-9; top-5 enforced");
}

// ---------------------------------------------------------------- criterion 9

#[test]
fn acceptance_09_commit_eligibility_boundary() {
    let repo = |stars, forks, commits, days| codecorpus::corpus::RepoSnapshot {
        repo_id: "r".into(),
        name: "r".into(),
        stars,
        forks,
        commit_count: commits,
        active_days: days,
        ..Default::default()
    };
    // The full boundary truth table around (100, 10, 100, 100).
    assert!(codecorpus::commits::repo_eligible(&repo(100, 10, 100, 100)));
    for (s, f, c, d) in [
        (99, 10, 100, 100),
        (100, 9, 100, 100),
        (100, 10, 99, 100),
        (100, 10, 100, 99),
        (0, 0, 0, 0),
        (1000, 0, 500, 400),
    ] {
        assert!(!codecorpus::commits::repo_eligible(&repo(s, f, c, d)), "({s},{f},{c},{d})");
    }
    for (s, f, c, d) in [(101, 10, 100, 100), (100, 11, 100, 100), (10_000, 500, 90_000, 3650)] {
        assert!(codecorpus::commits::repo_eligible(&repo(s, f, c, d)), "({s},{f},{c},{d})");
    }
    pass(9, "repository eligibility truth table exact at (100 stars, 10 forks, 100 commits, 100 days)");
}

// --------------------------------------------------------------- criterion 10

/// Independent edge-direction checker (not the library's).
fn edges_point_backward(order: &[String], edges: &[(String, String)]) -> bool {
    let pos: BTreeMap<&str, usize> =
        order.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
    edges.iter().all(|(importer, imported)| pos[imported.as_str()] < pos[importer.as_str()])
}

#[test]
fn acceptance_10_topological_packing() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for trial in 0..200 {
        let n = rng.gen_range(2..=50usize);
        // Random DAG: edges only from higher to lower rank in a random
        // permutation (importer -> imported).
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let paths: Vec<String> = (0..n).map(|i| format!("f{i:02}.py")).collect();
        let mut edges = BTreeSet::new();
        let edge_count = rng.gen_range(0..n * 2);
        for _ in 0..edge_count {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a == b {
                continue;
            }
            // perm ranks the nodes; higher rank imports lower rank.
            let (importer, imported) = if perm[a] > perm[b] { (a, b) } else { (b, a) };
            edges.insert((importer, imported));
        }
        let graph = pack::DepGraph {
            language: "Python".into(),
            nodes: paths.clone(),
            edges: edges.clone(),
        };
        let repo = pack::RepoFiles {
            repo_id: format!("repo-{trial}"),
            files: paths.iter().map(|p| (p.clone(), format!("content of {p}\n"))).collect(),
        };
        let sequences = pack::topo_pack(&repo, &graph, u64::MAX / 2).unwrap();
        assert_eq!(sequences.len(), 1, "huge cap packs one sequence");
        let order = &sequences[0].files;
        let edge_paths: Vec<(String, String)> = edges
            .iter()
            .map(|&(a, b)| (paths[a].clone(), paths[b].clone()))
            .collect();
        assert!(
            edges_point_backward(order, &edge_paths),
            "trial {trial}: an import is emitted after its importer"
        );
        assert!(pack::verify_partition(&repo, &sequences), "trial {trial}: partition broken");

        // Small cap: partition must still hold across multiple sequences.
        let capped = pack::topo_pack(&repo, &graph, 8).unwrap();
        assert!(pack::verify_partition(&repo, &capped), "trial {trial}: capped partition broken");
    }

    // Cycle collapse is deterministic.
    let nodes: Vec<String> = (0..6).map(|i| format!("c{i}.py")).collect();
    let mut cyc_edges = BTreeSet::new();
    cyc_edges.insert((0usize, 1usize));
    cyc_edges.insert((1, 2));
    cyc_edges.insert((2, 0)); // 3-cycle
    cyc_edges.insert((3, 4));
    cyc_edges.insert((4, 3)); // 2-cycle
    cyc_edges.insert((5, 0));
    let graph = pack::DepGraph { language: "Python".into(), nodes: nodes.clone(), edges: cyc_edges };
    let repo = pack::RepoFiles {
        repo_id: "cyclic".into(),
        files: nodes.iter().map(|p| (p.clone(), "x\n".to_string())).collect(),
    };
    let a = pack::topo_pack(&repo, &graph, u64::MAX / 2).unwrap();
    let b = pack::topo_pack(&repo, &graph, u64::MAX / 2).unwrap();
    assert_eq!(a[0].files, b[0].files, "cycle collapse must be deterministic");
    assert!(pack::verify_partition(&repo, &a));
    pass(10, "200 random DAGs pass the independent edge checker; cycles deterministic; partition holds");
}

// --------------------------------------------------------------- criterion 11

struct RecallFixture {
    docs: Vec<CodeDocument>,
    pools: recall::TrainingPools,
    unlabeled: Vec<CodeDocument>,
    quality: BTreeMap<DocId, f64>,
    eval_positives: Vec<CodeDocument>,
    eval_negatives: Vec<CodeDocument>,
}

/// Synthetic recall corpus: positives share topic+quality markers, near-miss
/// negatives share topic markers but carry junk markers and low quality.
fn recall_fixture(seed: u64) -> RecallFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topic = ["tutorial", "algorithm", "implementation", "compiler", "parser", "queue"];
    let quality_marks = ["documented", "modular", "tested"];
    let junk_marks = ["clickbait", "spamlink", "lorem"];
    let noise: Vec<String> = (0..300).map(|i| format!("n{i}")).collect();

    // boost adds extra topical/quality mass so a document clears the
    // promotion quantile of the trained positive pool.
    let make = |id: String, topical: bool, junky: bool, boost: bool, rng: &mut ChaCha8Rng| {
        let mut words: Vec<String> =
            (0..25).map(|_| noise.choose(rng).unwrap().clone()).collect();
        if topical {
            for _ in 0..6 {
                words.push(topic.choose(rng).unwrap().to_string());
            }
        }
        if junky {
            for _ in 0..5 {
                words.push(junk_marks.choose(rng).unwrap().to_string());
            }
        } else if topical {
            for _ in 0..3 {
                words.push(quality_marks.choose(rng).unwrap().to_string());
            }
        }
        if boost {
            for t in topic {
                words.push(t.to_string());
            }
            for q in quality_marks {
                words.push(q.to_string());
            }
        }
        words.shuffle(rng);
        CodeDocument::new(id.clone(), format!("{id}.txt"), words.join(" "))
    };

    let mut docs = Vec::new();
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    for i in 0..60 {
        let d = make(format!("pos-{i:03}"), true, false, false, &mut rng);
        positives.push(d.id.clone());
        docs.push(d);
        let d = make(format!("rng-{i:03}"), false, false, false, &mut rng);
        negatives.push(d.id.clone());
        docs.push(d);
    }
    let pools = recall::TrainingPools::new(positives, negatives, Vec::<DocId>::new()).unwrap();

    // Unlabeled: 30 strong positives (high quality, promotable) and 30
    // near-misses (recalled but low quality).
    let mut unlabeled = Vec::new();
    let mut quality = BTreeMap::new();
    for i in 0..30 {
        let d = make(format!("unl-good-{i:03}"), true, false, true, &mut rng);
        quality.insert(d.id.clone(), 0.8);
        unlabeled.push(d);
        let d = make(format!("unl-miss-{i:03}"), true, true, false, &mut rng);
        quality.insert(d.id.clone(), 0.1);
        unlabeled.push(d);
    }

    // Held-out evaluation set.
    let eval_positives: Vec<CodeDocument> = (0..40)
        .map(|i| make(format!("ev-pos-{i:03}"), true, false, false, &mut rng))
        .collect();
    let eval_negatives: Vec<CodeDocument> = (0..40)
        .map(|i| make(format!("ev-miss-{i:03}"), true, true, false, &mut rng))
        .collect();

    RecallFixture { docs, pools, unlabeled, quality, eval_positives, eval_negatives }
}

fn precision_on(model: &recall::RecallModel, fixture: &RecallFixture) -> f64 {
    let tp = fixture
        .eval_positives
        .iter()
        .filter(|d| model.score(&d.content) >= 0.0)
        .count();
    let fp = fixture
        .eval_negatives
        .iter()
        .filter(|d| model.score(&d.content) >= 0.0)
        .count();
    if tp + fp == 0 {
        return 0.0;
    }
    tp as f64 / (tp + fp) as f64
}

#[test]
fn acceptance_11_recall_classifier() {
    // Separable pools reach 99% training accuracy.
    let fixture = recall_fixture(0);
    let config = recall::RecallConfig {
        features: codecorpus::features::HashedNgramConfig::new(1 << 18, 2, 11),
        seed: 11,
        ..recall::RecallConfig::default()
    };
    let model = recall::train_recall(&fixture.pools, &fixture.docs, &config).unwrap();
    let mut correct = 0;
    let mut total = 0;
    for doc in &fixture.docs {
        let positive = fixture.pools.positives.contains(&doc.id);
        let s = model.score(&doc.content);
        total += 1;
        if (positive && s > 0.0) || (!positive && s < 0.0) {
            correct += 1;
        }
    }
    let accuracy = correct as f64 / total as f64;
    assert!(accuracy >= 0.99, "training accuracy {accuracy}");

    // The 2-round hard-negative loop strictly improves precision on planted
    // near-misses in >= 95% of 20 seeded runs.
    let mut improved = 0;
    for seed in 0..20u64 {
        let fixture = recall_fixture(100 + seed);
        let config = recall::RecallConfig {
            features: codecorpus::features::HashedNgramConfig::new(1 << 18, 2, seed),
            seed,
            ..recall::RecallConfig::default()
        };
        let round1 = recall::train_recall(&fixture.pools, &fixture.docs, &config).unwrap();
        let p1 = precision_on(&round1, &fixture);
        let outcome = recall::iterate_rounds(
            &fixture.pools,
            &fixture.docs,
            &fixture.unlabeled,
            &fixture.quality,
            2,
            &config,
        )
        .unwrap();
        let p2 = precision_on(&outcome.model, &fixture);
        if p2 > p1 {
            improved += 1;
        }
    }
    assert!(improved >= 19, "precision improved in only {improved}/20 runs");
    pass(
        11,
        &format!("recall accuracy {accuracy:.3}; hard-negative loop improved precision in {improved}/20 runs"),
    );
}

// --------------------------------------------------------------- criterion 12

#[test]
fn acceptance_12_needle_harness() {
    // Perfect oracle: 8x8 grid up to 128K characters, every cell 1.0.
    let lengths: Vec<usize> =
        vec![1_000, 2_000, 4_000, 8_000, 16_000, 32_000, 64_000, 128_000];
    let depths: Vec<f64> = (0..8).map(|i| i as f64 / 7.0).collect();
    let matrix = needle::run_matrix(&needle::OracleBackend, &lengths, &depths, 2, 12).unwrap();
    for (li, row) in matrix.cells.iter().enumerate() {
        for (di, &cell) in row.iter().enumerate() {
            assert_eq!(cell, 1.0, "oracle cell ({li},{di}) = {cell}");
        }
    }

    // Fair coin backend: 200 trials per cell, all cells within 3 sigma.
    let coin = needle::CoinBackend { accuracy: 0.5, seed: 9_424 };
    let small_lengths = vec![900, 1_400];
    let small_depths = vec![0.0, 0.5, 1.0];
    let coin_matrix = needle::run_matrix(&coin, &small_lengths, &small_depths, 200, 12).unwrap();
    let band = 3.0 * (0.25f64 / 200.0).sqrt(); // 0.106
    for row in &coin_matrix.cells {
        for &cell in row {
            assert!(
                (cell - 0.5).abs() <= band,
                "coin cell {cell} outside 0.5±{band:.3}"
            );
        }
    }
    pass(12, "oracle backend scores 1.0 on the full 8x8/128K grid; coin backend within binomial 3σ");
}

// --------------------------------------------------------------- criterion 13

fn pipeline_fixture(root: &Path) {
    use std::fs;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for repo in 0..5 {
        let dir = root.join(format!("repo{repo}/src"));
        fs::create_dir_all(&dir).unwrap();
        for i in 0..100 {
            let body = match i % 10 {
                0 => "def shared():\n    return 42\n".to_string(), // duplicates
                1 => format!("def broken_{i}(:\n    pass\n"),      // syntax-bad
                _ => {
                    let salt: u32 = rng.gen();
                    format!("def f_{repo}_{i}():\n    # worker {salt}\n    return {i} * 3\n")
                }
            };
            fs::write(dir.join(format!("m{i:03}.py")), body).unwrap();
        }
    }
}

fn data_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in walkdir::WalkDir::new(dir) {
        let entry = entry.unwrap();
        if !entry.file_type().is_file() {
            continue;
        }
        let name = entry.path().strip_prefix(dir).unwrap().to_string_lossy().to_string();
        if name.ends_with(".jsonl") || name.ends_with(".sha256") {
            out.insert(name, std::fs::read(entry.path()).unwrap());
        }
    }
    out
}

fn fixture_config(root: &Path, out: &Path, seed: u64) -> PipelineConfig {
    PipelineConfig {
        seed,
        workers: 0,
        input_root: root.to_path_buf(),
        output_root: out.to_path_buf(),
        shard_size: 128,
        stages: vec![
            StageConfig::Ingest {},
            StageConfig::Dedup {
                threshold: 0.85,
                k: 128,
                bands: 16,
                rows: 8,
                shingle: 3,
                minhash_seed: 1,
            },
            StageConfig::Filter { rules: vec!["syntax".into()] },
            StageConfig::Fim { ratio: 0.5, mode: "spm".into() },
        ],
    }
}

#[test]
fn acceptance_13_pipeline_determinism_and_decoupling() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw");
    pipeline_fixture(&raw);
    let file_count = walkdir::WalkDir::new(&raw)
        .into_iter()
        .filter(|e| e.as_ref().map(|e| e.file_type().is_file()).unwrap_or(false))
        .count();
    assert_eq!(file_count, 500);

    // Two executions with the same seed are output-identical.
    let out1 = dir.path().join("run1");
    let out2 = dir.path().join("run2");
    let outcome1 = pipeline::run_pipeline(&fixture_config(&raw, &out1, 77)).unwrap();
    let outcome2 = pipeline::run_pipeline(&fixture_config(&raw, &out2, 77)).unwrap();
    assert!(outcome1.failure.is_none() && outcome2.failure.is_none());
    let files1 = data_files(&out1);
    let files2 = data_files(&out2);
    assert!(!files1.is_empty());
    assert_eq!(files1, files2, "same-seed runs must be byte-identical");

    // Counts are monotone non-increasing across the filtering stages.
    let counts: Vec<usize> = outcome1.stats.rows.iter().map(|r| r.output_records).collect();
    assert!(counts[1] <= counts[0] && counts[2] <= counts[1]);

    // A different seed changes only the seeded stage outputs.
    let out3 = dir.path().join("run3");
    pipeline::run_pipeline(&fixture_config(&raw, &out3, 78)).unwrap();
    let files3 = data_files(&out3);
    for (name, bytes) in &files1 {
        if name.starts_with("04-fim") {
            continue;
        }
        assert_eq!(
            files3.get(name),
            Some(bytes),
            "seed-free stage output {name} changed with the seed"
        );
    }
    let fim_changed = files1
        .iter()
        .filter(|(n, _)| n.starts_with("04-fim"))
        .any(|(n, b)| files3.get(n) != Some(b));
    assert!(fim_changed, "fim output should depend on the seed");

    // Suffix re-run equals the full run's suffix output.
    let cfg = fixture_config(&raw, &out1, 77);
    pipeline::run_pipeline_from(&cfg, 3).unwrap();
    let rerun_filter = data_files(&out1.join("03-filter.v2"));
    let orig_filter = data_files(&out1.join("03-filter"));
    assert_eq!(rerun_filter, orig_filter, "suffix filter outputs differ");
    let rerun_fim = data_files(&out1.join("04-fim.v2"));
    let orig_fim = data_files(&out1.join("04-fim"));
    assert_eq!(rerun_fim, orig_fim, "suffix fim outputs differ");

    pass(13, "pipeline runs are seed-deterministic; suffix re-runs match full-run suffixes");
}
