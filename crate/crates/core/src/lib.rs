//! Link-analysis toolkit for signed social networks.
//!
//! The crate models a network of users joined by positive (trust/friend) and
//! negative (distrust/foe) links, together with sparse matrices counting the
//! positive and negative emotions users express toward each other. On top of
//! those structures it provides:
//!
//! * optimism/pessimism scores per user, in a rating-based and an
//!   emotion-based formulation ([`personality`]),
//! * four statistical pipelines relating emotions, neighbor imitation, and
//!   personality to link formation, all backed by a one-sided Welch t-test
//!   with extreme-tail p-values ([`pipelines`], [`stats`]),
//! * a balance-theory triad census ([`triads`]),
//! * a seeded synthetic-data generator with planted effect sizes used to
//!   validate the pipelines end to end ([`synth`]),
//! * TSV ingestion, report assembly, and a reproducible `run-all`
//!   orchestrator ([`io`], [`report`]).
//!
//! Everything downstream of construction works on frozen, immutable data;
//! all randomness is derived from explicit `u64` seeds.

pub mod emotion;
pub mod graph;
pub mod io;
pub mod personality;
pub mod pipelines;
pub mod report;
pub mod seed;
pub mod stats;
pub mod synth;
pub mod triads;

pub use emotion::{EmotionError, Expression, Polarity, UserEmotionEvent, build_emotion_matrices};
pub use graph::{
    DatasetStats, EmotionMatrices, GraphError, NetworkBuilder, Sign, SignedNetwork, UserId,
    compute_stats,
};
pub use personality::{
    EmotionAverages, ItemAverages, PersonalityScores, RatingTable, emotion_based_scores,
    item_averages, rating_based_scores,
};
pub use pipelines::{
    HypothesisReport, LinkDirection, Pipeline, PipelineConfig, PipelineError, SampleSummary,
    diffusion_test, emo_existence_test, emo_strength_test, personality_test,
};
pub use stats::{Sample, StatsError, TestResult, one_sided_test, student_t_upper_tail, welch_t};
pub use synth::{GeneratorConfig, GroundTruth, PersonalityDist, SynthData, SynthError, generate};
pub use triads::{TriadCensus, TriadClass, TriadKind, classify_triad, triad_census};
