//! Pipeline orchestration: stage graph, configuration, deterministic seeds,
//! and corpus statistics.
//!
//! Stages are decoupled: each one reads the previous stage's output
//! directory and writes a self-contained directory of its own, so any suffix
//! of the pipeline can be re-run. Stage outputs are immutable; re-running a
//! stage writes the next version (`NN-name`, `NN-name.v2`, ...) and
//! downstream stages read the latest version.
//!
//! Seed scoping: the global seed feeds only the seeded stages (fim, random
//! pack) through per-stage derived seeds. Dedup's MinHash seed is a stage
//! parameter with a fixed default, so changing the global seed leaves
//! dedup and filter outputs untouched.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::corpus::{self, CodeDocument};
use crate::dedup::{self, LshParams, MinHashConfig};
use crate::decontam::NgramIndex;
use crate::error::{Error, Result};
use crate::filter::{self, FilterVerdict, ParserRegistry};
use crate::fim::{self, FimMode};
use crate::hashing::derive_seed;
use crate::pack::{self, RepoFiles};
use crate::quality::{percentile_filter, ScorerModel, QUALITY_TAG};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub seed: u64,
    /// 0 means the rayon default.
    #[serde(default)]
    pub workers: usize,
    pub input_root: PathBuf,
    pub output_root: PathBuf,
    #[serde(default = "default_shard_size")]
    pub shard_size: usize,
    #[serde(rename = "stage")]
    pub stages: Vec<StageConfig>,
}

fn default_shard_size() -> usize {
    1000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StageConfig {
    Ingest {},
    Dedup {
        #[serde(default = "default_threshold")]
        threshold: f64,
        #[serde(default = "default_k")]
        k: usize,
        #[serde(default = "default_bands")]
        bands: usize,
        #[serde(default = "default_rows")]
        rows: usize,
        #[serde(default = "default_shingle")]
        shingle: usize,
        #[serde(default = "default_minhash_seed")]
        minhash_seed: u64,
    },
    Filter {
        rules: Vec<String>,
    },
    ScoreApply {
        model: PathBuf,
    },
    ScoreCut {
        drop_fraction: f64,
    },
    Fim {
        #[serde(default = "default_fim_ratio")]
        ratio: f64,
        #[serde(default = "default_fim_mode")]
        mode: String,
    },
    Pack {
        #[serde(default = "default_cap_tokens")]
        cap_tokens: u64,
        #[serde(default = "default_pack_mode")]
        mode: String,
    },
    Decontam {
        index: PathBuf,
    },
}

fn default_threshold() -> f64 {
    0.85
}
fn default_k() -> usize {
    256
}
fn default_bands() -> usize {
    16
}
fn default_rows() -> usize {
    16
}
fn default_shingle() -> usize {
    5
}
fn default_minhash_seed() -> u64 {
    1
}
fn default_fim_ratio() -> f64 {
    0.5
}
fn default_fim_mode() -> String {
    "spm".into()
}
fn default_cap_tokens() -> u64 {
    32_768
}
fn default_pack_mode() -> String {
    "topo".into()
}

impl StageConfig {
    pub fn name(&self) -> &'static str {
        match self {
            StageConfig::Ingest {} => "ingest",
            StageConfig::Dedup { .. } => "dedup",
            StageConfig::Filter { .. } => "filter",
            StageConfig::ScoreApply { .. } => "score-apply",
            StageConfig::ScoreCut { .. } => "score-cut",
            StageConfig::Fim { .. } => "fim",
            StageConfig::Pack { .. } => "pack",
            StageConfig::Decontam { .. } => "decontam",
        }
    }
}

pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let raw = fs::read_to_string(path)?;
    let config: PipelineConfig =
        toml::from_str(&raw).map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
    validate_config(&config)?;
    Ok(config)
}

pub fn validate_config(config: &PipelineConfig) -> Result<()> {
    if config.stages.is_empty() {
        return Err(Error::config("pipeline has no stages"));
    }
    let mut seen = std::collections::BTreeSet::new();
    for stage in &config.stages {
        if !seen.insert(stage.name()) {
            return Err(Error::config(format!("duplicate stage name {:?}", stage.name())));
        }
        match stage {
            StageConfig::Dedup { threshold, k, bands, rows, shingle, .. } => {
                if bands * rows != *k {
                    return Err(Error::config(format!(
                        "dedup: bands ({bands}) x rows ({rows}) must equal k ({k})"
                    )));
                }
                if !(0.0..=1.0).contains(threshold) {
                    return Err(Error::config("dedup: threshold must be in [0,1]"));
                }
                if *shingle == 0 {
                    return Err(Error::config("dedup: shingle width must be >= 1"));
                }
            }
            StageConfig::Filter { rules } => {
                for rule in rules {
                    if rule != "syntax" && rule != "webmin" {
                        return Err(Error::config(format!("filter: unknown rule {rule:?}")));
                    }
                }
            }
            StageConfig::ScoreCut { drop_fraction } => {
                if !(0.0..1.0).contains(drop_fraction) {
                    return Err(Error::config("score-cut: drop_fraction must be in [0,1)"));
                }
            }
            StageConfig::Fim { ratio, mode } => {
                if !(0.0..=1.0).contains(ratio) {
                    return Err(Error::config("fim: ratio must be in [0,1]"));
                }
                mode.parse::<FimMode>()?;
            }
            StageConfig::Pack { cap_tokens, mode } => {
                if *cap_tokens == 0 {
                    return Err(Error::config("pack: cap_tokens must be positive"));
                }
                if mode != "topo" && mode != "random" {
                    return Err(Error::config(format!("pack: unknown mode {mode:?}")));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// One row of the statistics report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageStats {
    pub stage: String,
    pub input_records: usize,
    pub output_records: usize,
    pub input_bytes: u64,
    pub output_bytes: u64,
    pub reduction_pct: f64,
    #[serde(default)]
    pub drop_reasons: BTreeMap<String, u64>,
    pub wall_ms: u128,
}

pub fn reduction_pct(input: usize, output: usize) -> f64 {
    if input == 0 {
        0.0
    } else {
        100.0 * (1.0 - output as f64 / input as f64)
    }
}

impl StageStats {
    pub fn new(stage: &str, input: (usize, u64), output: (usize, u64)) -> Self {
        StageStats {
            stage: stage.to_string(),
            input_records: input.0,
            output_records: output.0,
            input_bytes: input.1,
            output_bytes: output.1,
            reduction_pct: reduction_pct(input.0, output.0),
            drop_reasons: BTreeMap::new(),
            wall_ms: 0,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct StatsReport {
    pub rows: Vec<StageStats>,
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<12} {:>10} {:>10} {:>12} {:>12} {:>9} {:>9}",
            "stage", "in", "out", "in_bytes", "out_bytes", "reduct%", "ms"
        )?;
        for row in &self.rows {
            writeln!(
                f,
                "{:<12} {:>10} {:>10} {:>12} {:>12} {:>8.1}% {:>9}",
                row.stage,
                row.input_records,
                row.output_records,
                row.input_bytes,
                row.output_bytes,
                row.reduction_pct,
                row.wall_ms
            )?;
        }
        Ok(())
    }
}

/// Counts records and content bytes in a shard directory.
pub fn corpus_measure(dir: &Path) -> Result<(usize, u64)> {
    let docs = corpus::shard::read_dir_shards(dir)?;
    let bytes = docs.iter().map(|d| d.byte_len).sum();
    Ok((docs.len(), bytes))
}

/// Stats row comparing two corpus directories.
pub fn report_stats(before: &Path, after: &Path, stage: &str) -> Result<StageStats> {
    Ok(StageStats::new(stage, corpus_measure(before)?, corpus_measure(after)?))
}

pub struct RunOutcome {
    pub stats: StatsReport,
    /// Name and error text of the failed stage, when the run halted early.
    pub failure: Option<(String, String)>,
}

/// Base directory for a stage (version 1).
fn stage_base(config: &PipelineConfig, idx: usize, name: &str) -> PathBuf {
    config.output_root.join(format!("{:02}-{}", idx + 1, name))
}

/// Latest existing version of a stage directory.
fn latest_version(base: &Path) -> Option<PathBuf> {
    let mut found = None;
    if base.exists() {
        found = Some(base.to_path_buf());
    }
    for v in 2..1000 {
        let candidate = PathBuf::from(format!("{}.v{v}", base.display()));
        if candidate.exists() {
            found = Some(candidate);
        } else {
            break;
        }
    }
    found
}

/// Next unused version of a stage directory.
fn next_version(base: &Path) -> PathBuf {
    if !base.exists() {
        return base.to_path_buf();
    }
    for v in 2..1000 {
        let candidate = PathBuf::from(format!("{}.v{v}", base.display()));
        if !candidate.exists() {
            return candidate;
        }
    }
    unreachable!("a thousand stage versions");
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<RunOutcome> {
    run_pipeline_from(config, 1)
}

/// Runs stages `from_stage..` (1-based); earlier stages must already have
/// output directories. A stage failure halts the run and returns the
/// partial report.
pub fn run_pipeline_from(config: &PipelineConfig, from_stage: usize) -> Result<RunOutcome> {
    validate_config(config)?;
    if from_stage < 1 || from_stage > config.stages.len() {
        return Err(Error::config(format!(
            "from-stage {from_stage} outside 1..={}",
            config.stages.len()
        )));
    }
    fs::create_dir_all(&config.output_root)?;

    let mut report = StatsReport::default();
    let mut previous_dir: Option<PathBuf> = None;
    for (idx, stage) in config.stages.iter().enumerate() {
        let base = stage_base(config, idx, stage.name());
        if idx + 1 < from_stage {
            let dir = latest_version(&base).ok_or_else(|| {
                Error::config(format!(
                    "cannot resume from stage {from_stage}: {} has no output",
                    stage.name()
                ))
            })?;
            previous_dir = Some(dir);
            continue;
        }
        let input_dir = previous_dir.clone().unwrap_or_else(|| config.input_root.clone());
        let out_dir = next_version(&base);
        fs::create_dir_all(&out_dir)?;

        let started = Instant::now();
        log::info!("stage {} -> {}", stage.name(), out_dir.display());
        match run_stage(config, stage, &input_dir, &out_dir) {
            Ok(mut stats) => {
                stats.wall_ms = started.elapsed().as_millis();
                let json = serde_json::to_string_pretty(&stats)?;
                fs::write(out_dir.join("stats.json"), json)?;
                report.rows.push(stats);
                previous_dir = Some(out_dir);
            }
            Err(e) => {
                log::error!("stage {} failed: {e}", stage.name());
                return Ok(RunOutcome {
                    stats: report,
                    failure: Some((stage.name().to_string(), e.to_string())),
                });
            }
        }
    }
    Ok(RunOutcome { stats: report, failure: None })
}

fn run_stage(
    config: &PipelineConfig,
    stage: &StageConfig,
    input_dir: &Path,
    out_dir: &Path,
) -> Result<StageStats> {
    match stage {
        StageConfig::Ingest {} => {
            let (docs, rejects) = corpus::ingest_tree(&config.input_root)?;
            let input = (docs.len() + rejects.len(), 0u64);
            let out_bytes: u64 = docs.iter().map(|d| d.byte_len).sum();
            let count = docs.len();
            corpus::shard::write_shards(out_dir, "part", docs, config.shard_size)?;
            let mut stats = StageStats::new("ingest", input, (count, out_bytes));
            if !rejects.is_empty() {
                stats.drop_reasons.insert("non-utf8".into(), rejects.len() as u64);
            }
            Ok(stats)
        }
        StageConfig::Dedup { threshold, k, bands, rows, shingle, minhash_seed } => {
            let docs = corpus::shard::read_dir_shards(input_dir)?;
            let input = measure(&docs);
            let minhash = MinHashConfig { k: *k, shingle_w: *shingle, seed: *minhash_seed };
            let lsh = LshParams { threshold: *threshold, bands: *bands, rows: *rows };
            let dedup_report = dedup::dedup_corpus(&docs, &minhash, &lsh)?;
            let kept: Vec<CodeDocument> = docs
                .iter()
                .filter(|d| dedup_report.kept.contains(&d.id))
                .cloned()
                .collect();
            let mut stats = StageStats::new("dedup", input, measure(&kept));
            for reason in dedup_report.dropped.values() {
                let kind = if reason.starts_with("exact") {
                    "exact-duplicate"
                } else {
                    "near-duplicate"
                };
                *stats.drop_reasons.entry(kind.into()).or_insert(0) += 1;
            }
            fs::write(
                out_dir.join("report.json"),
                serde_json::to_string_pretty(&dedup_report)?,
            )?;
            corpus::shard::write_shards(out_dir, "part", kept, config.shard_size)?;
            Ok(stats)
        }
        StageConfig::Filter { rules } => {
            let docs = corpus::shard::read_dir_shards(input_dir)?;
            let input = measure(&docs);
            let registry = ParserRegistry::new();
            let mut kept = Vec::new();
            let mut verdicts: Vec<FilterVerdict> = Vec::new();
            let mut stats = StageStats::new("filter", input, (0, 0));
            for doc in &docs {
                let mut dropped = None;
                let mut flag = None;
                for rule in rules {
                    let verdict = match rule.as_str() {
                        "syntax" => filter::syntax_check(doc, &registry),
                        _ => filter::web_minimal_filter(doc),
                    };
                    if !verdict.kept {
                        dropped = Some(verdict);
                        break;
                    }
                    if verdict.rule.is_some() {
                        flag = verdict.rule.clone();
                    }
                    verdicts.push(verdict);
                }
                match dropped {
                    Some(verdict) => {
                        let rule = verdict.rule.clone().unwrap_or_default();
                        *stats.drop_reasons.entry(rule).or_insert(0) += 1;
                        verdicts.push(verdict);
                    }
                    None => {
                        let doc = match
                            flag {
                            Some(f) => doc.with_tag("filter", serde_json::json!({ "flag": f })),
                            None => doc.clone(),
                        };
                        kept.push(doc);
                    }
                }
            }
            let out = measure(&kept);
            stats.output_records = out.0;
            stats.output_bytes = out.1;
            stats.reduction_pct = reduction_pct(input.0, out.0);
            fs::write(
                out_dir.join("report.json"),
                serde_json::to_string_pretty(&verdicts)?,
            )?;
            corpus::shard::write_shards(out_dir, "part", kept, config.shard_size)?;
            Ok(stats)
        }
        StageConfig::ScoreApply { model } => {
            let docs = corpus::shard::read_dir_shards(input_dir)?;
            let input = measure(&docs);
            let scorer = ScorerModel::load(model)?;
            let scores = scorer.predict_batch(&docs);
            let tagged: Vec<CodeDocument> = docs
                .iter()
                .zip(scores)
                .map(|(d, s)| d.with_tag(QUALITY_TAG, serde_json::json!(s)))
                .collect();
            let stats = StageStats::new("score-apply", input, measure(&tagged));
            corpus::shard::write_shards(out_dir, "part", tagged, config.shard_size)?;
            Ok(stats)
        }
        StageConfig::ScoreCut { drop_fraction } => {
            let docs = corpus::shard::read_dir_shards(input_dir)?;
            let input = measure(&docs);
            let scored: Vec<_> = docs
                .iter()
                .map(|d| (d.id.clone(), d.tag_f64(QUALITY_TAG)))
                .collect();
            let kept_ids = percentile_filter(&scored, *drop_fraction)?;
            let kept: Vec<CodeDocument> = docs
                .iter()
                .filter(|d| kept_ids.contains(&d.id))
                .cloned()
                .collect();
            let mut stats = StageStats::new("score-cut", input, measure(&kept));
            let dropped = input.0 - kept.len();
            if dropped > 0 {
                stats.drop_reasons.insert("percentile-cut".into(), dropped as u64);
            }
            corpus::shard::write_shards(out_dir, "part", kept, config.shard_size)?;
            Ok(stats)
        }
        StageConfig::Fim { ratio, mode } => {
            let docs = corpus::shard::read_dir_shards(input_dir)?;
            let input = measure(&docs);
            let mode: FimMode = mode.parse()?;
            let texts = fim::emit_corpus(&docs, *ratio, mode, derive_seed(config.seed, "fim"))?;
            let out_bytes = write_jsonl_chunks(out_dir, "training", &texts, config.shard_size)?;
            let mut stats = StageStats::new("fim", input, (texts.len(), out_bytes));
            let skipped = texts
                .iter()
                .filter(|t| t.kind == fim::EmitKind::SentinelSkip)
                .count();
            if skipped > 0 {
                stats.drop_reasons.insert("sentinel-skip".into(), skipped as u64);
            }
            Ok(stats)
        }
        StageConfig::Pack { cap_tokens, mode } => {
            let docs = corpus::shard::read_dir_shards(input_dir)?;
            let input = measure(&docs);
            let groups = corpus::group_by_repo(&docs);
            let pack_seed = derive_seed(config.seed, "pack");
            let mut sequences = Vec::new();
            let mut fallbacks = 0u64;
            for (repo_id, members) in groups {
                let repo = RepoFiles {
                    repo_id: repo_id.clone(),
                    files: members
                        .iter()
                        .map(|d| (d.path.clone(), d.content.clone()))
                        .collect(),
                };
                if mode == "topo" {
                    let language = dominant_language(&members);
                    match pack::extract_deps(&repo.files, &language) {
                        Ok(graph) => {
                            sequences.extend(pack::topo_pack(&repo, &graph, *cap_tokens)?);
                            continue;
                        }
                        Err(Error::NoImportRules(_)) => {
                            log::warn!("repo {repo_id}: no import rules for {language}; random packing");
                            fallbacks += 1;
                        }
                        Err(e) => return Err(e),
                    }
                }
                sequences.extend(pack::random_pack(&repo, pack_seed, *cap_tokens)?);
            }
            let out_bytes = write_jsonl_chunks(out_dir, "packed", &sequences, config.shard_size)?;
            let mut stats = StageStats::new("pack", input, (sequences.len(), out_bytes));
            if fallbacks > 0 {
                stats.drop_reasons.insert("random-fallback".into(), fallbacks);
            }
            Ok(stats)
        }
        StageConfig::Decontam { index } => {
            let docs = corpus::shard::read_dir_shards(input_dir)?;
            let input = measure(&docs);
            let index = NgramIndex::load(index)?;
            let scrub_report = crate::decontam::scrub(&docs, &index);
            let kept: Vec<CodeDocument> = docs
                .iter()
                .filter(|d| scrub_report.kept.contains(&d.id))
                .cloned()
                .collect();
            let mut stats = StageStats::new("decontam", input, measure(&kept));
            for removed in &scrub_report.removed {
                *stats
                    .drop_reasons
                    .entry(removed.benchmark.clone())
                    .or_insert(0) += 1;
            }
            fs::write(
                out_dir.join("report.json"),
                serde_json::to_string_pretty(&scrub_report)?,
            )?;
            corpus::shard::write_shards(out_dir, "part", kept, config.shard_size)?;
            Ok(stats)
        }
    }
}

fn measure(docs: &[CodeDocument]) -> (usize, u64) {
    (docs.len(), docs.iter().map(|d| d.byte_len).sum())
}

fn dominant_language(docs: &[&CodeDocument]) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        *counts.entry(doc.language.as_str()).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .max_by_key(|(lang, count)| (*count, std::cmp::Reverse(*lang)))
        .map(|(lang, _)| lang.to_string())
        .unwrap_or_else(|| corpus::UNKNOWN.to_string())
}

/// Writes serializable records as chunked JSONL files; returns bytes written.
fn write_jsonl_chunks<T: Serialize>(
    dir: &Path,
    prefix: &str,
    records: &[T],
    chunk_size: usize,
) -> Result<u64> {
    let mut total = 0u64;
    for (idx, chunk) in records.chunks(chunk_size.max(1)).enumerate() {
        let path = dir.join(format!("{prefix}-{idx:05}.jsonl"));
        let mut bytes = Vec::new();
        for record in chunk {
            serde_json::to_writer(&mut bytes, record)?;
            bytes.push(b'\n');
        }
        total += bytes.len() as u64;
        let mut file = fs::File::create(path)?;
        file.write_all(&bytes)?;
    }
    Ok(total)
}
