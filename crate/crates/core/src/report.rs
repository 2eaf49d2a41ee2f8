//! Full-analysis orchestration and the report document.
//!
//! `run_all` executes the statistics block, personality scoring, every
//! pipeline variant in the run plan, and the triad census, then assembles a
//! single JSON-serializable report plus a flat TSV table for plotting.
//! Pipeline failures are captured per entry and never abort the run.
//!
//! Reports are byte-reproducible: entry order follows the run plan, every
//! map is a struct with fixed field order, and wall-clock time only appears
//! when a timestamp is passed in explicitly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::graph::{DatasetStats, Sign, compute_stats};
use crate::io::{FrozenDataset, IngestReport};
use crate::personality::{PersonalityScores, emotion_based_scores, rating_based_scores};
use crate::pipelines::{
    DEFAULT_SAMPLING_ATTEMPTS, HypothesisReport, LinkDirection, Pipeline, PipelineConfig,
    PipelineError, diffusion_test, emo_existence_test, emo_strength_test, personality_test,
};
use crate::triads::{TriadCensus, triad_census};

/// Knobs for one `run-all` invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub alpha: f64,
    /// K values for the emotion-strength test.
    pub strength_ks: Vec<usize>,
    /// K values for the personality test.
    pub personality_ks: Vec<usize>,
    pub sampling_attempts: u32,
    pub direction: LinkDirection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            alpha: 0.01,
            strength_ks: vec![10, 30, 50],
            personality_ks: vec![20, 30, 50],
            sampling_attempts: DEFAULT_SAMPLING_ATTEMPTS,
            direction: LinkDirection::Outgoing,
        }
    }
}

/// Where the personality scores came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreSource {
    Rating,
    Emotion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonalitySummary {
    pub source: ScoreSource,
    pub users_with_optimism: usize,
    pub users_with_pessimism: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_optimism: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_pessimism: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum PipelineOutcome {
    Ok { report: HypothesisReport },
    Error { category: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineEntry {
    pub pipeline: Pipeline,
    pub sign: Sign,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub outcome: PipelineOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriadSection {
    pub census: TriadCensus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub balanced_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

/// Everything needed to reproduce the run bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub inputs: Vec<InputDigest>,
    pub run: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl Manifest {
    pub fn new(inputs: Vec<InputDigest>, run: RunConfig, timestamp: Option<String>) -> Self {
        Self {
            tool: "signet".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs,
            run,
            timestamp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub manifest: Manifest,
    pub stats: DatasetStats,
    pub ingest: IngestReport,
    pub personality: PersonalitySummary,
    pub pipelines: Vec<PipelineEntry>,
    pub triads: TriadSection,
}

/// Stable machine-readable category for a pipeline failure.
pub fn error_category(err: &PipelineError) -> &'static str {
    use crate::stats::StatsError;
    match err {
        PipelineError::NoObservations(_) => "no-observations",
        PipelineError::AllSkipped(_) => "all-skipped",
        PipelineError::InsufficientPairs { .. } => "insufficient-pairs",
        PipelineError::InsufficientUsers { .. } => "insufficient-users",
        PipelineError::InvalidConfig(_) => "invalid-config",
        PipelineError::Stats(StatsError::DegenerateSamples) => "degenerate-samples",
        PipelineError::Stats(StatsError::TooFewObservations(_)) => "insufficient-samples",
        PipelineError::Stats(_) => "stats",
        PipelineError::Graph(_) => "graph",
    }
}

fn mean_defined(values: &[Option<f64>]) -> Option<f64> {
    let (mut sum, mut count) = (0.0, 0usize);
    for v in values.iter().flatten() {
        sum += v;
        count += 1;
    }
    (count > 0).then(|| sum / count as f64)
}

/// The per-entry plan implied by a [`RunConfig`]: every pipeline in both
/// sign variants, ranked pipelines once per configured K.
fn run_plan(run: &RunConfig) -> Vec<(Pipeline, Sign, Option<usize>)> {
    let mut plan = Vec::new();
    for sign in [Sign::Positive, Sign::Negative] {
        plan.push((Pipeline::EmoExistence, sign, None));
        for &k in &run.strength_ks {
            plan.push((Pipeline::EmoStrength, sign, Some(k)));
        }
        plan.push((Pipeline::Diffusion, sign, None));
        for &k in &run.personality_ks {
            plan.push((Pipeline::Personality, sign, Some(k)));
        }
    }
    plan
}

/// Personality scores for a dataset: rating-based when ratings are present,
/// emotion-based otherwise.
pub fn dataset_scores(dataset: &FrozenDataset) -> (PersonalityScores, ScoreSource) {
    match &dataset.ratings {
        Some(table) => (rating_based_scores(table), ScoreSource::Rating),
        None => (emotion_based_scores(&dataset.emotions), ScoreSource::Emotion),
    }
}

/// Run the whole analysis battery over a frozen dataset.
///
/// Entries run in parallel; their order in the report is the plan order, so
/// output does not depend on thread count.
pub fn run_all(dataset: &FrozenDataset, run: &RunConfig, manifest: Manifest) -> Report {
    let stats = compute_stats(&dataset.network, &dataset.emotions)
        .expect("frozen dataset dimensions agree");
    let (scores, source) = dataset_scores(dataset);
    let personality = PersonalitySummary {
        source,
        users_with_optimism: scores.defined_o(),
        users_with_pessimism: scores.defined_p(),
        mean_optimism: mean_defined(&scores.o),
        mean_pessimism: mean_defined(&scores.p),
    };

    let pipelines: Vec<PipelineEntry> = run_plan(run)
        .into_par_iter()
        .map(|(pipeline, sign, k)| {
            let cfg = PipelineConfig {
                sign,
                k: k.unwrap_or(2),
                alpha: run.alpha,
                seed: run.seed,
                sampling_attempts: run.sampling_attempts,
                direction: run.direction,
            };
            let outcome = match pipeline {
                Pipeline::EmoExistence => emo_existence_test(&dataset.network, &dataset.emotions, &cfg),
                Pipeline::EmoStrength => emo_strength_test(&dataset.network, &dataset.emotions, &cfg),
                Pipeline::Diffusion => diffusion_test(&dataset.network, &cfg),
                Pipeline::Personality => personality_test(&dataset.network, &scores, &cfg),
            };
            let outcome = match outcome {
                Ok(report) => PipelineOutcome::Ok { report },
                Err(err) => PipelineOutcome::Error {
                    category: error_category(&err).to_string(),
                    message: err.to_string(),
                },
            };
            PipelineEntry {
                pipeline,
                sign,
                k,
                outcome,
            }
        })
        .collect();

    let census = triad_census(&dataset.network);
    Report {
        manifest,
        stats,
        ingest: dataset.report.clone(),
        personality,
        pipelines,
        triads: TriadSection {
            balanced_fraction: census.balanced_fraction(),
            census,
        },
    }
}

impl Report {
    /// Canonical serialized form (pretty JSON, trailing newline).
    pub fn to_json(&self) -> String {
        let mut body = serde_json::to_string_pretty(self).expect("report serializes");
        body.push('\n');
        body
    }

    /// Plot-ready flat table: one row per pipeline entry.
    pub fn to_flat_table(&self) -> String {
        let mut out = String::from(
            "pipeline\tsign\tk\talpha\tseed\tn1\tn2\tmean1\tmean2\tt\tdf\tp_value\tlog10_p\trejected\tenumerated\tskipped\terror\n",
        );
        for entry in &self.pipelines {
            let k = entry.k.map_or(String::from("-"), |k| k.to_string());
            match &entry.outcome {
                PipelineOutcome::Ok { report } => {
                    let r = &report.result;
                    let s = &report.summary;
                    out.push_str(&format!(
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:e}\t{}\t{}\t{}\t{}\t-\n",
                        entry.pipeline.name(),
                        entry.sign,
                        k,
                        r.alpha,
                        report.config.seed,
                        s.n1,
                        s.n2,
                        s.mean1,
                        s.mean2,
                        r.t_statistic,
                        r.degrees_of_freedom,
                        r.p_value,
                        r.log10_p_value,
                        r.rejected,
                        s.enumerated,
                        s.skipped,
                    ));
                }
                PipelineOutcome::Error { category, .. } => {
                    out.push_str(&format!(
                        "{}\t{}\t{}\t{}\t{}\t-\t-\t-\t-\t-\t-\t-\t-\t-\t-\t-\t{}\n",
                        entry.pipeline.name(),
                        entry.sign,
                        k,
                        self.manifest.run.alpha,
                        self.manifest.run.seed,
                        category,
                    ));
                }
            }
        }
        out
    }
}

/// Hex SHA-256 of a byte slice, for input digests.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}
