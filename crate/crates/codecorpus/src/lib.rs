//! codecorpus — a corpus-curation toolkit for code LLM pretraining data.
//!
//! The library is organized around independent, individually runnable stages
//! over a shared document model:
//!
//! - [`corpus`] — document/repository types, language inference, sharded
//!   JSONL persistence.
//! - [`dedup`] — exact (SHA-256) and near (MinHash/LSH) deduplication at
//!   file and repository level.
//! - [`filter`] — minimal rule filters: syntax validity and low-quality web
//!   heuristics.
//! - [`quality`] — LLM-based quality scoring: prompt construction, oracle
//!   querying, rating extraction, a trainable linear scorer, percentile
//!   filtering, and scorer evaluation metrics.
//! - [`recall`] — hashed n-gram classifier with iterative hard-negative
//!   training for code-related and high-quality data recall.
//! - [`commits`] — commit-data curation: repository eligibility, BM25 file
//!   retrieval, and code-change-prediction sample formatting.
//! - [`pack`] — repository-level long-context packing: dependency graphs,
//!   topological concatenation, subgraph decomposition, random packing.
//! - [`fim`] — fill-in-the-middle sample generation in SPM/PSM layouts.
//! - [`decontam`] — benchmark decontamination by word 10-gram overlap.
//! - [`needle`] — "needle in the code" long-context pressure test.
//! - [`pipeline`] — stage orchestration, configuration, and statistics.
//!
//! Every capability has a runnable example under `examples/`; the `codecorpus`
//! binary exposes the same stages as subcommands.

pub mod binfmt;
pub mod commits;
pub mod corpus;
pub mod decontam;
pub mod dedup;
pub mod error;
pub mod features;
pub mod filter;
pub mod fim;
pub mod hashing;
pub mod needle;
pub mod pack;
pub mod pipeline;
pub mod quality;
pub mod recall;

pub use error::{Error, Result};
