//! Thin subcommand CLI over the codecorpus library. Exit codes: 0 success,
//! 1 stage failure, 2 configuration error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use codecorpus::corpus::{self, shard, CodeDocument, DocId};
use codecorpus::decontam::{self, IndexMode, NgramIndex};
use codecorpus::dedup::{self, LshParams, MinHashConfig};
use codecorpus::error::Error;
use codecorpus::filter::{self, ParserRegistry};
use codecorpus::fim::{self, FimMode};
use codecorpus::needle::{self, CoinBackend, ConstantBackend, OracleBackend};
use codecorpus::pack::{self, RepoFiles};
use codecorpus::pipeline::{self, StatsReport};
use codecorpus::quality::{
    self, CompletionClient, FileMockClient, HttpCompletionClient, HttpOracleConfig, LabelOutcome,
    LabelingOptions, QualityLabel, RetryPolicy, ScorerConfig, ScorerModel, QUALITY_TAG,
};
use codecorpus::recall::{self, RecallConfig, RecallModel, TrainingPools};

#[derive(Parser)]
#[command(name = "codecorpus", version, about = "Corpus curation toolkit for code LLM pretraining data")]
struct Cli {
    /// Global seed for seeded stages.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Pipeline configuration file (used by `run`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest a directory tree into sharded corpus files.
    Ingest {
        #[arg(long)]
        root: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        shard_size: usize,
    },
    /// Exact + near deduplication.
    Dedup {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.85)]
        threshold: f64,
        #[arg(long, default_value_t = 256)]
        k: usize,
        #[arg(long, default_value_t = 16)]
        bands: usize,
        #[arg(long, default_value_t = 16)]
        rows: usize,
        #[arg(long, default_value_t = 5)]
        shingle: usize,
        #[arg(long, default_value_t = 1)]
        minhash_seed: u64,
        /// file or repo.
        #[arg(long, default_value = "file")]
        level: String,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        shard_size: usize,
    },
    /// Minimal rule filters.
    Filter {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated: syntax,webmin.
        #[arg(long, default_value = "syntax,webmin", value_delimiter = ',')]
        rules: Vec<String>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        shard_size: usize,
    },
    /// Quality scoring subsystem.
    Score {
        #[command(subcommand)]
        cmd: ScoreCmd,
    },
    /// Recall classifier.
    Recall {
        #[command(subcommand)]
        cmd: RecallCmd,
    },
    /// Commit-data curation.
    Commits {
        #[command(subcommand)]
        cmd: CommitsCmd,
    },
    /// Repository-level long-context packing.
    Pack {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 32_768)]
        cap_tokens: u64,
        /// topo or random.
        #[arg(long, default_value = "topo")]
        mode: String,
    },
    /// Fill-in-the-middle sample emission.
    Fim {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        ratio: f64,
        #[arg(long, default_value = "spm")]
        mode: String,
    },
    /// Benchmark decontamination.
    Decontam {
        #[command(subcommand)]
        cmd: DecontamCmd,
    },
    /// Long-context pressure test.
    Needle {
        #[command(subcommand)]
        cmd: NeedleCmd,
    },
    /// Run a configured pipeline.
    Run {
        /// 1-based stage to resume from.
        #[arg(long)]
        from: Option<usize>,
    },
    /// Compare two corpus directories.
    Report {
        #[arg(long)]
        before: PathBuf,
        #[arg(long)]
        after: PathBuf,
    },
}

#[derive(Args)]
struct OracleArgs {
    /// Chat-completions endpoint URL.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long, default_value = "oracle-model")]
    model: String,
    /// Environment variable holding the bearer token.
    #[arg(long, default_value = "CODECORPUS_ORACLE_TOKEN")]
    token_env: String,
    /// File of canned replies (mock client) instead of HTTP.
    #[arg(long)]
    mock: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    retries: u32,
    /// Global rate limit, requests per second.
    #[arg(long)]
    rps: Option<f64>,
}

impl OracleArgs {
    fn client(&self) -> Result<Box<dyn CompletionClient>, Error> {
        if let Some(mock) = &self.mock {
            return Ok(Box::new(FileMockClient::from_path(mock)?));
        }
        let endpoint = self
            .endpoint
            .clone()
            .ok_or_else(|| Error::config("either --endpoint or --mock is required"))?;
        Ok(Box::new(HttpCompletionClient::new(HttpOracleConfig {
            endpoint,
            model: self.model.clone(),
            token_env: self.token_env.clone(),
            timeout_secs: 60,
        })?))
    }
}

#[derive(Subcommand)]
enum ScoreCmd {
    /// Query the oracle for ground-truth labels.
    Label {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Stratified-sample this many documents before labeling.
        #[arg(long)]
        plan_total: Option<usize>,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Fit the linear scorer on labeled documents.
    Train {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 25)]
        epochs: usize,
        #[arg(long, default_value_t = 0.5)]
        lr: f64,
    },
    /// Attach scorer predictions as quality tags.
    Apply {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        shard_size: usize,
    },
    /// Evaluate the scorer against held-out labels.
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
    /// Drop the bottom fraction by quality score.
    Cut {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.10)]
        drop_fraction: f64,
        #[arg(long, default_value_t = 1000)]
        shard_size: usize,
    },
}

#[derive(Subcommand)]
enum RecallCmd {
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        pools: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    Apply {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
    },
    Iterate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        pools: PathBuf,
        #[arg(long)]
        unlabeled: PathBuf,
        /// JSONL of quality labels for hard-negative mining.
        #[arg(long)]
        quality: PathBuf,
        #[arg(long, default_value_t = 2)]
        rounds: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum CommitsCmd {
    /// Format commit records into prediction samples.
    Format {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        topk: usize,
    },
}

#[derive(Subcommand)]
enum DecontamCmd {
    /// Build an n-gram index from benchmark text files.
    Build {
        #[arg(long)]
        benchmarks: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = decontam::DEFAULT_NGRAM)]
        n: usize,
    },
    /// Remove contaminated documents.
    Scrub {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        shard_size: usize,
    },
}

#[derive(Subcommand)]
enum NeedleCmd {
    Run {
        /// Comma-separated context lengths in characters.
        #[arg(long, value_delimiter = ',')]
        lengths: Vec<usize>,
        /// Comma-separated depths in [0,1].
        #[arg(long, value_delimiter = ',')]
        depths: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long)]
        report: PathBuf,
        /// Optional rendered heatmap.
        #[arg(long)]
        image: Option<PathBuf>,
        /// oracle, coin:<accuracy>, constant:<text>, or http.
        #[arg(long, default_value = "oracle")]
        backend: String,
        #[command(flatten)]
        oracle: OracleArgs,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if cli.workers > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
        {
            eprintln!("error: cannot configure worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Ingest { root, out, shard_size } => {
            let (docs, rejects) = corpus::ingest_tree(&root)?;
            let count = docs.len();
            shard::write_shards(&out, "part", docs, shard_size)?;
            println!("ingested {count} documents ({} rejected)", rejects.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Dedup {
            input,
            out,
            threshold,
            k,
            bands,
            rows,
            shingle,
            minhash_seed,
            level,
            report,
            shard_size,
        } => {
            let docs = shard::read_dir_shards(&input)?;
            let minhash = MinHashConfig { k, shingle_w: shingle, seed: minhash_seed };
            let lsh = LshParams { threshold, bands, rows };
            let (dedup_report, kept): (dedup::DedupReport, Vec<CodeDocument>) =
                match level.as_str() {
                    "file" => {
                        let report = dedup::dedup_corpus(&docs, &minhash, &lsh)?;
                        let kept = docs
                            .iter()
                            .filter(|d| report.kept.contains(&d.id))
                            .cloned()
                            .collect();
                        (report, kept)
                    }
                    "repo" => {
                        let groups = corpus::group_by_repo(&docs);
                        let report = dedup::repo_level_dedup(&groups, &minhash, &lsh)?;
                        let kept_repos: std::collections::BTreeSet<&str> =
                            report.kept.iter().map(|id| id.as_str()).collect();
                        let kept = groups
                            .iter()
                            .filter(|(repo, _)| kept_repos.contains(repo.as_str()))
                            .flat_map(|(_, members)| members.iter().map(|d| (*d).clone()))
                            .collect();
                        (report, kept)
                    }
                    other => return Err(Error::config(format!("unknown dedup level {other:?}"))),
                };
            println!(
                "kept {} of {} ids ({} exact groups, {} near pairs)",
                dedup_report.kept.len(),
                dedup_report.kept.len() + dedup_report.dropped.len(),
                dedup_report.exact_groups.len(),
                dedup_report.near_pairs.len()
            );
            if let Some(report_path) = report {
                write_json(&report_path, &dedup_report)?;
            }
            shard::write_shards(&out, "part", kept, shard_size)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Filter { input, out, rules, report, shard_size } => {
            let docs = shard::read_dir_shards(&input)?;
            let registry = ParserRegistry::new();
            let mut kept = Vec::new();
            let mut verdicts = Vec::new();
            for doc in &docs {
                let mut keep = true;
                for rule in &rules {
                    let verdict = match rule.as_str() {
                        "syntax" => filter::syntax_check(doc, &registry),
                        "webmin" => filter::web_minimal_filter(doc),
                        other => {
                            return Err(Error::config(format!("unknown filter rule {other:?}")))
                        }
                    };
                    let dropped = !verdict.kept;
                    verdicts.push(verdict);
                    if dropped {
                        keep = false;
                        break;
                    }
                }
                if keep {
                    kept.push(doc.clone());
                }
            }
            println!("kept {} of {}", kept.len(), docs.len());
            if let Some(report_path) = report {
                write_json(&report_path, &verdicts)?;
            }
            shard::write_shards(&out, "part", kept, shard_size)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Score { cmd } => score_cmd(cmd, cli.seed),
        Command::Recall { cmd } => recall_cmd(cmd, cli.seed),
        Command::Commits { cmd } => commits_cmd(cmd),
        Command::Pack { input, out, cap_tokens, mode } => {
            let docs = shard::read_dir_shards(&input)?;
            let groups = corpus::group_by_repo(&docs);
            let mut sequences = Vec::new();
            for (repo_id, members) in groups {
                let repo = RepoFiles {
                    repo_id,
                    files: members
                        .iter()
                        .map(|d| (d.path.clone(), d.content.clone()))
                        .collect(),
                };
                match mode.as_str() {
                    "topo" => {
                        let language = members
                            .first()
                            .map(|d| d.language.clone())
                            .unwrap_or_default();
                        match pack::extract_deps(&repo.files, &language) {
                            Ok(graph) => {
                                sequences.extend(pack::topo_pack(&repo, &graph, cap_tokens)?)
                            }
                            Err(Error::NoImportRules(lang)) => {
                                log::warn!(
                                    "repo {}: no import rules for {lang}; random packing",
                                    repo.repo_id
                                );
                                sequences.extend(pack::random_pack(&repo, cli.seed, cap_tokens)?);
                            }
                            Err(e) => return Err(e),
                        }
                    }
                    "random" => {
                        sequences.extend(pack::random_pack(&repo, cli.seed, cap_tokens)?)
                    }
                    other => return Err(Error::config(format!("unknown pack mode {other:?}"))),
                }
            }
            fs::create_dir_all(&out)?;
            write_jsonl(&out.join("packed-00000.jsonl"), &sequences)?;
            println!("packed {} sequences", sequences.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Fim { input, out, ratio, mode } => {
            let docs = shard::read_dir_shards(&input)?;
            let mode: FimMode = mode.parse()?;
            let texts = fim::emit_corpus(&docs, ratio, mode, cli.seed)?;
            let fim_count = texts.iter().filter(|t| t.kind == fim::EmitKind::Fim).count();
            fs::create_dir_all(&out)?;
            write_jsonl(&out.join("training-00000.jsonl"), &texts)?;
            println!(
                "emitted {} texts ({} FIM, fraction {:.3})",
                texts.len(),
                fim_count,
                fim_count as f64 / texts.len().max(1) as f64
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Decontam { cmd } => decontam_cmd(cmd, cli.seed),
        Command::Needle { cmd } => needle_cmd(cmd, cli.seed),
        Command::Run { from } => {
            let config_path = cli
                .config
                .ok_or_else(|| Error::config("run requires --config FILE"))?;
            let mut config = pipeline::load_config(&config_path)?;
            if cli.seed != 0 {
                config.seed = cli.seed;
            }
            let outcome = pipeline::run_pipeline_from(&config, from.unwrap_or(1))?;
            print!("{}", outcome.stats);
            if let Some((stage, reason)) = outcome.failure {
                eprintln!("stage {stage} failed: {reason}");
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { before, after } => {
            let row = pipeline::report_stats(&before, &after, "report")?;
            let report = StatsReport { rows: vec![row] };
            print!("{report}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn score_cmd(cmd: ScoreCmd, seed: u64) -> Result<ExitCode, Error> {
    match cmd {
        ScoreCmd::Label { input, out, plan_total, oracle } => {
            let docs = shard::read_dir_shards(&input)?;
            let docs: Vec<CodeDocument> = match plan_total {
                Some(total) => {
                    let chosen: std::collections::BTreeSet<DocId> =
                        quality::stratified_sample(&docs, total, seed).into_iter().collect();
                    docs.into_iter().filter(|d| chosen.contains(&d.id)).collect()
                }
                None => docs,
            };
            let client = oracle.client()?;
            let opts = LabelingOptions {
                retry: RetryPolicy { max_retries: oracle.retries, ..RetryPolicy::default() },
                requests_per_sec: oracle.rps,
                keep_explanations: false,
            };
            let outcomes = quality::label_documents(&docs, client.as_ref(), &opts);
            let labeled = outcomes.iter().filter(|o| o.label.is_some()).count();
            write_jsonl(&out, &outcomes)?;
            println!("labeled {labeled} of {} documents", outcomes.len());
            Ok(ExitCode::SUCCESS)
        }
        ScoreCmd::Train { input, labels, out, epochs, lr } => {
            let docs = shard::read_dir_shards(&input)?;
            let labels = read_labels(&labels)?;
            let by_id: BTreeMap<&str, &CodeDocument> =
                docs.iter().map(|d| (d.id.as_str(), d)).collect();
            let pairs: Vec<(&CodeDocument, &QualityLabel)> = labels
                .iter()
                .filter_map(|l| by_id.get(l.doc_id.as_str()).map(|d| (*d, l)))
                .collect();
            let mut config = ScorerConfig::with_seed(seed);
            config.epochs = epochs;
            config.learning_rate = lr;
            let outcome = quality::train_scorer(&pairs, &config)?;
            println!(
                "trained on {} examples; final MSE {:.6}",
                pairs.len(),
                outcome.loss_per_epoch.last().copied().unwrap_or(0.0)
            );
            outcome.model.save(&out)?;
            Ok(ExitCode::SUCCESS)
        }
        ScoreCmd::Apply { input, model, out, shard_size } => {
            let docs = shard::read_dir_shards(&input)?;
            let scorer = ScorerModel::load(&model)?;
            let scores = scorer.predict_batch(&docs);
            let tagged: Vec<CodeDocument> = docs
                .iter()
                .zip(scores)
                .map(|(d, s)| d.with_tag(QUALITY_TAG, serde_json::json!(s)))
                .collect();
            shard::write_shards(&out, "part", tagged, shard_size)?;
            println!("scored {} documents", docs.len());
            Ok(ExitCode::SUCCESS)
        }
        ScoreCmd::Eval { input, labels, model } => {
            let docs = shard::read_dir_shards(&input)?;
            let labels = read_labels(&labels)?;
            let by_id: BTreeMap<&str, &CodeDocument> =
                docs.iter().map(|d| (d.id.as_str(), d)).collect();
            let pairs: Vec<(&CodeDocument, &QualityLabel)> = labels
                .iter()
                .filter_map(|l| by_id.get(l.doc_id.as_str()).map(|d| (*d, l)))
                .collect();
            let scorer = ScorerModel::load(&model)?;
            let report = quality::evaluate_scorer(&scorer, &pairs)?;
            println!("samples:  {}", report.predictions.len());
            println!("eps_cmae: {:.4}", report.eps_cmae);
            println!("eps_mae:  {:.4}", report.eps_mae);
            Ok(ExitCode::SUCCESS)
        }
        ScoreCmd::Cut { input, out, drop_fraction, shard_size } => {
            let docs = shard::read_dir_shards(&input)?;
            let scored: Vec<(DocId, Option<f64>)> = docs
                .iter()
                .map(|d| (d.id.clone(), d.tag_f64(QUALITY_TAG)))
                .collect();
            let kept_ids = quality::percentile_filter(&scored, drop_fraction)?;
            let kept: Vec<CodeDocument> = docs
                .iter()
                .filter(|d| kept_ids.contains(&d.id))
                .cloned()
                .collect();
            println!("kept {} of {}", kept.len(), docs.len());
            shard::write_shards(&out, "part", kept, shard_size)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn recall_cmd(cmd: RecallCmd, seed: u64) -> Result<ExitCode, Error> {
    match cmd {
        RecallCmd::Train { corpus, pools, out } => {
            let docs = shard::read_dir_shards(&corpus)?;
            let pools: TrainingPools = serde_json::from_str(&fs::read_to_string(pools)?)?;
            let config = recall_config(seed);
            let model = recall::train_recall(&pools, &docs, &config)?;
            model.save(&out)?;
            println!("trained recall model (round {})", model.round);
            Ok(ExitCode::SUCCESS)
        }
        RecallCmd::Apply { corpus, model, threshold, out } => {
            let docs = shard::read_dir_shards(&corpus)?;
            let model = RecallModel::load(&model)?;
            let (recalled, scores) = recall::apply_recall(&model, &docs, threshold);
            write_jsonl(&out, &scores)?;
            println!("recalled {} of {}", recalled.len(), docs.len());
            Ok(ExitCode::SUCCESS)
        }
        RecallCmd::Iterate { corpus, pools, unlabeled, quality, rounds, out } => {
            let docs = shard::read_dir_shards(&corpus)?;
            let unlabeled_docs = shard::read_dir_shards(&unlabeled)?;
            let pools: TrainingPools = serde_json::from_str(&fs::read_to_string(pools)?)?;
            let labels = read_labels(&quality)?;
            let quality_scores: BTreeMap<DocId, f64> =
                labels.iter().map(|l| (l.doc_id.clone(), l.rescaled)).collect();
            let config = recall_config(seed);
            let outcome = recall::iterate_rounds(
                &pools,
                &docs,
                &unlabeled_docs,
                &quality_scores,
                rounds,
                &config,
            )?;
            for (round, (promoted, mined)) in outcome.rounds.iter().enumerate() {
                println!("round {}: +{promoted} positives, +{mined} hard negatives", round + 2);
            }
            outcome.model.save(&out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn commits_cmd(cmd: CommitsCmd) -> Result<ExitCode, Error> {
    match cmd {
        CommitsCmd::Format { input, out, topk } => {
            let mut records = Vec::new();
            let mut files: Vec<PathBuf> = fs::read_dir(&input)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("jsonl"))
                .collect();
            files.sort();
            for file in files {
                for line in fs::read_to_string(&file)?.lines() {
                    if line.trim().is_empty() {
                        continue;
                    }
                    let record: codecorpus::commits::CommitRecord = serde_json::from_str(line)?;
                    records.push(record);
                }
            }
            let total = records.len();
            let survivors = codecorpus::commits::dedup_commits(&records);
            let mut samples = Vec::new();
            for idx in survivors {
                samples.push(codecorpus::commits::format_commit_sample(&records[idx], topk)?);
            }
            fs::create_dir_all(&out)?;
            write_jsonl(&out.join("samples-00000.jsonl"), &samples)?;
            println!(
                "formatted {} samples ({} duplicates dropped)",
                samples.len(),
                total - samples.len()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn decontam_cmd(cmd: DecontamCmd, seed: u64) -> Result<ExitCode, Error> {
    match cmd {
        DecontamCmd::Build { benchmarks, out, n } => {
            let mut sets = Vec::new();
            let mut files: Vec<PathBuf> = fs::read_dir(&benchmarks)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            files.sort();
            for file in files {
                let name = file
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or("benchmark")
                    .to_string();
                // One benchmark item per line.
                let items: Vec<String> = fs::read_to_string(&file)?
                    .lines()
                    .filter(|l| !l.trim().is_empty())
                    .map(|l| l.to_string())
                    .collect();
                sets.push((name, items));
            }
            let index = decontam::build_index(&sets, n, IndexMode::Hashed, seed)?;
            println!(
                "indexed {} grams from {} benchmarks ({} short items)",
                index.gram_count(),
                index.manifest.len(),
                index.short_items
            );
            index.save(&out)?;
            Ok(ExitCode::SUCCESS)
        }
        DecontamCmd::Scrub { input, index, out, report, shard_size } => {
            let docs = shard::read_dir_shards(&input)?;
            let index = NgramIndex::load(&index)?;
            let scrub_report = decontam::scrub(&docs, &index);
            let kept: Vec<CodeDocument> = docs
                .iter()
                .filter(|d| scrub_report.kept.contains(&d.id))
                .cloned()
                .collect();
            println!(
                "kept {} of {} ({} removed)",
                kept.len(),
                docs.len(),
                scrub_report.removed.len()
            );
            if let Some(report_path) = report {
                write_json(&report_path, &scrub_report)?;
            }
            shard::write_shards(&out, "part", kept, shard_size)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn needle_cmd(cmd: NeedleCmd, seed: u64) -> Result<ExitCode, Error> {
    match cmd {
        NeedleCmd::Run { lengths, depths, trials, report, image, backend, oracle } => {
            let backend_client: Box<dyn CompletionClient> = match backend.as_str() {
                "oracle" => Box::new(OracleBackend),
                "http" => oracle.client()?,
                other => {
                    if let Some(acc) = other.strip_prefix("coin:") {
                        let accuracy: f64 = acc
                            .parse()
                            .map_err(|_| Error::config(format!("bad coin accuracy {acc:?}")))?;
                        Box::new(CoinBackend { accuracy, seed })
                    } else if let Some(text) = other.strip_prefix("constant:") {
                        Box::new(ConstantBackend(text.to_string()))
                    } else {
                        return Err(Error::config(format!("unknown backend {other:?}")));
                    }
                }
            };
            let matrix =
                needle::run_matrix(backend_client.as_ref(), &lengths, &depths, trials, seed)?;
            matrix.write_csv(&report)?;
            if let Some(image_path) = image {
                matrix.write_heatmap_png(&image_path)?;
            }
            let mean: f64 = matrix.cells.iter().flatten().sum::<f64>()
                / (matrix.lengths.len() * matrix.depths.len()) as f64;
            println!("backend {}: mean accuracy {mean:.3}", matrix.backend);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn recall_config(seed: u64) -> RecallConfig {
    let base = RecallConfig::default();
    RecallConfig {
        features: codecorpus::features::HashedNgramConfig { seed, ..base.features },
        seed,
        ..base
    }
}

fn read_labels(path: &Path) -> Result<Vec<QualityLabel>, Error> {
    let mut labels = Vec::new();
    for line in fs::read_to_string(path)?.lines() {
        if line.trim().is_empty() {
            continue;
        }
        // Accept both raw labels and labeling outcomes.
        if let Ok(label) = serde_json::from_str::<QualityLabel>(line) {
            labels.push(label);
            continue;
        }
        let outcome: LabelOutcome = serde_json::from_str(line)?;
        if let Some(label) = outcome.label {
            labels.push(label);
        }
    }
    Ok(labels)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn write_jsonl<T: serde::Serialize>(path: &Path, records: &[T]) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut bytes = Vec::new();
    for record in records {
        serde_json::to_writer(&mut bytes, record)?;
        bytes.push(b'\n');
    }
    let mut file = fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}
