//! "Needle in the code" long-context pressure test.
//!
//! A haystack of seeded filler functions hides one distinctive needle
//! function; the backend is asked what string the needle returns and is
//! graded by normalized containment of the expected answer. Lengths are
//! measured in characters, keeping the harness tokenizer-free.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::hash64;
use crate::quality::oracle::{CompletionClient, OracleError};

const FILLER_VERBS: &[&str] = &[
    "blend", "scan", "merge", "fold", "rotate", "align", "trace", "indexof", "batch", "cycle",
    "probe", "stack", "shift", "clamp", "route", "sample",
];
const FILLER_NOUNS: &[&str] = &[
    "buffer", "matrix", "cursor", "ledger", "window", "bucket", "stream", "packet", "vector",
    "anchor", "lattice", "token", "branch", "record", "beacon", "corpus",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NeedleCase {
    pub haystack: String,
    pub needle: String,
    pub depth: f64,
    pub query: String,
    /// The needle's identifying answer string.
    pub expected: String,
    /// Character offset of the needle inside the haystack.
    pub needle_offset: usize,
}

impl NeedleCase {
    /// The full prompt handed to a backend.
    pub fn prompt(&self) -> String {
        format!("{}\n{}", self.haystack, self.query)
    }
}

fn filler_function(rng: &mut ChaCha8Rng, ordinal: usize) -> String {
    let verb = FILLER_VERBS[rng.gen_range(0..FILLER_VERBS.len())];
    let noun = FILLER_NOUNS[rng.gen_range(0..FILLER_NOUNS.len())];
    let k1: u32 = rng.gen_range(2..97);
    let k2: u32 = rng.gen_range(2..97);
    let k3: u32 = rng.gen_range(2..9973);
    format!(
        "def {verb}_{noun}_{ordinal}(a, b):\n    \"\"\"Combine the {noun} pair with fixed offsets.\"\"\"\n    total = a * {k1} + b * {k2}\n    return total % {k3}\n\n"
    )
}

/// Generates one case: filler functions to the target character length with
/// the needle inserted at the relative depth, deterministic per seed. The
/// needle's start lands within one filler unit of `depth * len`.
pub fn generate_case(length: usize, depth: f64, seed: u64) -> Result<NeedleCase> {
    if !(0.0..=1.0).contains(&depth) {
        return Err(Error::config(format!("depth must be in [0,1], got {depth}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let noun = FILLER_NOUNS[rng.gen_range(0..FILLER_NOUNS.len())];
    let needle_name = format!("unlock_{noun}_{:08x}", rng.gen::<u32>());
    let secret = format!("vault-{:08x}-{:04x}", rng.gen::<u32>(), rng.gen::<u16>());
    let needle = format!(
        "def {needle_name}():\n    \"\"\"Return the access key for the sealed channel.\"\"\"\n    return \"{secret}\"\n\n"
    );
    if length < needle.len() {
        return Err(Error::invalid(format!(
            "target length {length} is smaller than the needle ({} chars)",
            needle.len()
        )));
    }

    let mut units: Vec<String> = Vec::new();
    let mut filler_len = 0usize;
    while filler_len + needle.len() < length {
        let unit = loop {
            let unit = filler_function(&mut rng, units.len());
            // Identifier collisions with the needle are rejected and the
            // unit regenerated.
            if !unit.contains(&needle_name) && !unit.contains(&secret) {
                break unit;
            }
        };
        filler_len += unit.len();
        units.push(unit);
    }

    // Insert at the unit boundary closest to depth * filler length.
    let target = (depth * filler_len as f64).round() as usize;
    let mut needle_offset = 0usize;
    let mut insert_at = units.len();
    let mut cum = 0usize;
    let mut best_gap = usize::MAX;
    for k in 0..=units.len() {
        let gap = cum.abs_diff(target);
        if gap < best_gap {
            best_gap = gap;
            insert_at = k;
            needle_offset = cum;
        }
        if k < units.len() {
            cum += units[k].len();
        }
    }

    let mut haystack = String::with_capacity(filler_len + needle.len());
    for unit in &units[..insert_at] {
        haystack.push_str(unit);
    }
    haystack.push_str(&needle);
    for unit in &units[insert_at..] {
        haystack.push_str(unit);
    }

    if haystack.matches(&needle_name).count() != 1 {
        return Err(Error::invalid("needle identifier occurs more than once"));
    }

    let query = format!(
        "Somewhere in the code above there is a function named {needle_name}. \
         What exact string does it return? Reply with that string only."
    );
    Ok(NeedleCase {
        haystack,
        needle,
        depth,
        query,
        expected: secret,
        needle_offset,
    })
}

fn normalize(text: &str) -> String {
    text.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

/// 1 iff the expected identifying string occurs in the answer after
/// normalization. Appending text to an answer can never flip 1 to 0.
pub fn grade(case: &NeedleCase, answer: &str) -> u8 {
    u8::from(normalize(answer).contains(&normalize(&case.expected)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NeedleMatrix {
    pub backend: String,
    pub lengths: Vec<usize>,
    pub depths: Vec<f64>,
    /// cells[length_idx][depth_idx] = accuracy in [0,1].
    pub cells: Vec<Vec<f64>>,
}

impl NeedleMatrix {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("length,depth,accuracy\n");
        for (li, len) in self.lengths.iter().enumerate() {
            for (di, depth) in self.depths.iter().enumerate() {
                out.push_str(&format!("{len},{depth},{}\n", self.cells[li][di]));
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Renders the accuracy grid as a PNG heatmap (red = 0, green = 1).
    pub fn write_heatmap_png(&self, path: &Path) -> Result<()> {
        const CELL: u32 = 32;
        let w = self.depths.len() as u32 * CELL;
        let h = self.lengths.len() as u32 * CELL;
        let mut img = image::RgbImage::new(w.max(1), h.max(1));
        for (li, row) in self.cells.iter().enumerate() {
            for (di, &acc) in row.iter().enumerate() {
                let color = image::Rgb([
                    (220.0 * (1.0 - acc)) as u8 + 30,
                    (200.0 * acc) as u8 + 30,
                    40,
                ]);
                for y in 0..CELL {
                    for x in 0..CELL {
                        img.put_pixel(di as u32 * CELL + x, li as u32 * CELL + y, color);
                    }
                }
            }
        }
        img.save(path)
            .map_err(|e| Error::invalid(format!("cannot write heatmap: {e}")))?;
        Ok(())
    }
}

/// Runs the full grid: per-cell accuracy is the mean grade over `trials`
/// deterministic cases. Backend failures score the trial 0 and are logged.
pub fn run_matrix(
    backend: &dyn CompletionClient,
    lengths: &[usize],
    depths: &[f64],
    trials: usize,
    seed: u64,
) -> Result<NeedleMatrix> {
    if lengths.is_empty() || depths.is_empty() || trials == 0 {
        return Err(Error::config("lengths, depths, and trials must be non-empty"));
    }
    let mut cells = vec![vec![0.0; depths.len()]; lengths.len()];
    for (li, &length) in lengths.iter().enumerate() {
        for (di, &depth) in depths.iter().enumerate() {
            let hits: u32 = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let case_seed = hash64(
                        format!("{length}/{depth}/{trial}").as_bytes(),
                        seed,
                    );
                    let case = match generate_case(length, depth, case_seed) {
                        Ok(c) => c,
                        Err(e) => {
                            log::error!("case generation failed: {e}");
                            return 0u32;
                        }
                    };
                    match backend.complete(&case.prompt()) {
                        Ok(answer) => u32::from(grade(&case, &answer)),
                        Err(e) => {
                            log::warn!("backend failed on a trial: {e}");
                            0
                        }
                    }
                })
                .sum();
            cells[li][di] = f64::from(hits) / trials as f64;
        }
    }
    Ok(NeedleMatrix {
        backend: backend.name().to_string(),
        lengths: lengths.to_vec(),
        depths: depths.to_vec(),
        cells,
    })
}

/// Reference backend: finds the queried function in the haystack by
/// substring search and returns its literal. Scores 1.0 everywhere by
/// construction.
pub struct OracleBackend;

impl OracleBackend {
    fn solve(prompt: &str) -> Option<String> {
        let name_re = Regex::new(r"function named (\w+)\.").ok()?;
        let name = name_re.captures(prompt)?.get(1)?.as_str();
        let def_at = prompt.find(&format!("def {name}("))?;
        let ret_re = Regex::new(r#"return "([^"]+)""#).ok()?;
        let caps = ret_re.captures(&prompt[def_at..])?;
        Some(caps.get(1)?.as_str().to_string())
    }
}

impl CompletionClient for OracleBackend {
    fn complete(&self, prompt: &str) -> std::result::Result<String, OracleError> {
        Self::solve(prompt).ok_or_else(|| OracleError::Fatal("needle not found".into()))
    }

    fn name(&self) -> &str {
        "perfect-oracle"
    }
}

/// Backend that always answers the same text.
pub struct ConstantBackend(pub String);

impl CompletionClient for ConstantBackend {
    fn complete(&self, _prompt: &str) -> std::result::Result<String, OracleError> {
        Ok(self.0.clone())
    }

    fn name(&self) -> &str {
        "constant"
    }
}

/// Backend that answers correctly with a fixed probability, deterministic
/// per (prompt, seed).
pub struct CoinBackend {
    pub accuracy: f64,
    pub seed: u64,
}

impl CompletionClient for CoinBackend {
    fn complete(&self, prompt: &str) -> std::result::Result<String, OracleError> {
        let coin = hash64(prompt.as_bytes(), self.seed) as f64 / u64::MAX as f64;
        if coin < self.accuracy {
            OracleBackend
                .complete(prompt)
                .map_err(|e| OracleError::Fatal(format!("coin oracle failed: {e}")))
        } else {
            Ok("i cannot locate that function".to_string())
        }
    }

    fn name(&self) -> &str {
        "coin"
    }
}
