//! The four link-analysis pipelines.
//!
//! Each pipeline builds two observation vectors from the frozen data and
//! hands them to the one-sided Welch test:
//!
//! * emotion existence — linked-rate of emotion pairs vs sampled controls,
//! * emotion strength — ranked emotion pairs in K groups, compared pairwise,
//! * diffusion — linked-rate of friend-endorsed targets vs sampled controls,
//! * personality — users ranked into K levels by score, compared pairwise.
//!
//! Ranked tests give every one of the K(K−1)/2 group comparisons its own
//! disjoint set of underlying link indicators (rank slices within groups for
//! the strength test, cross-group link counts for the personality test).
//! Reusing whole-group counts across comparisons would correlate the
//! observations and inflate the t statistic under the null by roughly
//! (K+1)/3, so a nominal 5% level would reject 20–30% of null datasets.
//!
//! Control sampling derives an RNG per observation index, so results are
//! identical regardless of enumeration parallelism or thread count.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EmotionMatrices, GraphError, Sign, SignedNetwork, UserId};
use crate::personality::PersonalityScores;
use crate::seed::derive_rng;
use crate::stats::{Sample, StatsError, TestResult, one_sided_test};

const TAG_EXISTENCE_CONTROL: u64 = 0x20;
const TAG_DIFFUSION_CONTROL: u64 = 0x21;

pub const DEFAULT_STRENGTH_GROUPS: usize = 10;
pub const DEFAULT_PERSONALITY_GROUPS: usize = 20;
pub const DEFAULT_SAMPLING_ATTEMPTS: u32 = 100;

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("no observations: {0}")]
    NoObservations(String),
    #[error("all {0} observations exhausted their control-sampling attempts")]
    AllSkipped(u64),
    #[error("insufficient pairs: need at least {needed}, found {found}")]
    InsufficientPairs { needed: usize, found: usize },
    #[error("insufficient users with defined scores: need {needed}, found {found}")]
    InsufficientUsers { needed: usize, found: usize },
    #[error("invalid pipeline config: {0}")]
    InvalidConfig(String),
    #[error("inconclusive: {0}")]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    EmoExistence,
    EmoStrength,
    Diffusion,
    Personality,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::EmoExistence => "emo-existence",
            Pipeline::EmoStrength => "emo-strength",
            Pipeline::Diffusion => "diffusion",
            Pipeline::Personality => "personality",
        }
    }
}

/// Which link direction the personality test counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LinkDirection {
    /// Links established by the ranked users (the default reading).
    #[default]
    Outgoing,
    /// Links received by the ranked users (documented variant).
    Incoming,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Which hypothesis family: positive or negative links/emotions.
    pub sign: Sign,
    /// Group count for the ranked tests; ignored by the sampling tests.
    pub k: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Rejection-sampling retry cap per control observation.
    pub sampling_attempts: u32,
    pub direction: LinkDirection,
}

impl PipelineConfig {
    pub fn new(sign: Sign, seed: u64) -> Self {
        Self {
            sign,
            k: DEFAULT_STRENGTH_GROUPS,
            alpha: 0.01,
            seed,
            sampling_attempts: DEFAULT_SAMPLING_ATTEMPTS,
            direction: LinkDirection::Outgoing,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    fn validate(&self, ranked: bool) -> Result<(), PipelineError> {
        if !(0.0 < self.alpha && self.alpha < 1.0) {
            return Err(PipelineError::InvalidConfig(format!(
                "alpha must be in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.sampling_attempts == 0 {
            return Err(PipelineError::InvalidConfig(
                "sampling_attempts must be >= 1".into(),
            ));
        }
        if ranked && self.k < 2 {
            return Err(PipelineError::InvalidConfig(format!(
                "ranked tests need k >= 2, got {}",
                self.k
            )));
        }
        Ok(())
    }
}

/// Sizes and means of the two observation vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n1: usize,
    pub n2: usize,
    pub mean1: f64,
    pub mean2: f64,
    /// Candidate observations before control-sampling skips.
    pub enumerated: u64,
    /// Observations dropped because control sampling was exhausted.
    pub skipped: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub pipeline: Pipeline,
    pub config: PipelineConfig,
    pub result: TestResult,
    pub summary: SampleSummary,
    pub conclusion: String,
}

fn flag(b: bool) -> f64 {
    if b { 1.0 } else { 0.0 }
}

fn check_dims(net: &SignedNetwork, emotions: &EmotionMatrices) -> Result<(), PipelineError> {
    if net.num_users() != emotions.num_users() {
        return Err(PipelineError::Graph(GraphError::DimensionMismatch {
            network: net.num_users(),
            emotions: emotions.num_users(),
        }));
    }
    Ok(())
}

fn sign_word(sign: Sign) -> &'static str {
    match sign {
        Sign::Positive => "positive",
        Sign::Negative => "negative",
    }
}

fn conclusion(pipeline: Pipeline, cfg: &PipelineConfig, result: &TestResult) -> String {
    let s = sign_word(cfg.sign);
    let claim = match pipeline {
        Pipeline::EmoExistence => format!(
            "pairs with {s} emotions establish {s} links at a higher rate than emotion-free controls"
        ),
        Pipeline::EmoStrength => format!(
            "pairs with stronger {s} emotions establish {s} links at a higher rate than weaker ones"
        ),
        Pipeline::Diffusion => format!(
            "users establish {s} links to targets their friends already {s}ly link more often than to matched controls"
        ),
        Pipeline::Personality => {
            let trait_name = match cfg.sign {
                Sign::Positive => "optimism",
                Sign::Negative => "pessimism",
            };
            format!("users ranked higher on {trait_name} establish more {s} links")
        }
    };
    if result.rejected {
        format!("H0 rejected at alpha={}: {claim}.", cfg.alpha)
    } else {
        format!(
            "H0 retained at alpha={}: no significant evidence that {claim}.",
            cfg.alpha
        )
    }
}

fn build_report(
    pipeline: Pipeline,
    cfg: &PipelineConfig,
    h: Vec<f64>,
    l: Vec<f64>,
    h_label: &str,
    l_label: &str,
    enumerated: u64,
    skipped: u64,
) -> Result<HypothesisReport, PipelineError> {
    let h = Sample::new(h, h_label);
    let l = Sample::new(l, l_label);
    let summary_means = (h.mean(), l.mean());
    let result = one_sided_test(&h, &l, cfg.alpha)?;
    let conclusion = conclusion(pipeline, cfg, &result);
    Ok(HypothesisReport {
        pipeline,
        config: *cfg,
        result,
        summary: SampleSummary {
            n1: h.len(),
            n2: l.len(),
            mean1: summary_means.0,
            mean2: summary_means.1,
            enumerated,
            skipped,
        },
        conclusion,
    })
}

/// Do pairs with stored emotions of this sign carry same-sign links more
/// often than sampled emotion-free controls?
///
/// For every stored (i, j) of the chosen side the linked indicator joins
/// `v_p`; a uniformly sampled k with no same-sign emotion from i contributes
/// the control indicator to `v_r`. Exhausted controls skip the whole
/// observation and are reported.
pub fn emo_existence_test(
    net: &SignedNetwork,
    emotions: &EmotionMatrices,
    cfg: &PipelineConfig,
) -> Result<HypothesisReport, PipelineError> {
    cfg.validate(false)?;
    check_dims(net, emotions)?;
    let side = emotions.side(cfg.sign);
    let n = net.num_users();

    let mut v_p = Vec::new();
    let mut v_r = Vec::new();
    let mut enumerated = 0u64;
    let mut skipped = 0u64;
    for (index, (i, j, _)) in side.iter().enumerate() {
        enumerated += 1;
        let mut rng = derive_rng(cfg.seed, TAG_EXISTENCE_CONTROL, index as u64);
        let mut control = None;
        for _ in 0..cfg.sampling_attempts {
            let candidate = UserId(rng.random_range(0..n as u32));
            if candidate != i && side.count(i, candidate) == 0 {
                control = Some(candidate);
                break;
            }
        }
        let Some(k) = control else {
            skipped += 1;
            continue;
        };
        v_p.push(flag(net.sign(i, j) == Some(cfg.sign)));
        v_r.push(flag(net.sign(i, k) == Some(cfg.sign)));
    }

    if enumerated == 0 {
        return Err(PipelineError::NoObservations(format!(
            "no stored {} emotion pairs",
            sign_word(cfg.sign)
        )));
    }
    if v_p.is_empty() {
        return Err(PipelineError::AllSkipped(skipped));
    }
    build_report(
        Pipeline::EmoExistence,
        cfg,
        v_p,
        v_r,
        "emotion-pair link indicators",
        "control-pair link indicators",
        enumerated,
        skipped,
    )
}

/// Do stronger emotions go with more same-sign links?
///
/// Stored pairs of the chosen side are ranked by count (descending, ties by
/// pair index), cut into K equal groups, and each group is further cut into
/// K−1 equal rank slices. The comparison (E_a, E_b) counts linked pairs in
/// E_a's slice reserved for b against E_b's slice reserved for a, so all
/// K(K−1)/2 observations are over disjoint pair sets.
pub fn emo_strength_test(
    net: &SignedNetwork,
    emotions: &EmotionMatrices,
    cfg: &PipelineConfig,
) -> Result<HypothesisReport, PipelineError> {
    cfg.validate(true)?;
    check_dims(net, emotions)?;
    let side = emotions.side(cfg.sign);
    let k = cfg.k;

    let mut pairs: Vec<(UserId, UserId, u32)> = side.iter().collect();
    // canonical iteration order makes the descending sort's tie-break the
    // ascending pair index
    pairs.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));

    let m = pairs.len();
    let group_size = m / k;
    let slice_len = group_size / (k - 1);
    if slice_len == 0 {
        return Err(PipelineError::InsufficientPairs {
            needed: k * (k - 1),
            found: m,
        });
    }
    pairs.truncate(k * group_size);

    let linked_in = |range: std::ops::Range<usize>| -> f64 {
        pairs[range]
            .iter()
            .filter(|&&(i, j, _)| net.sign(i, j) == Some(cfg.sign))
            .count() as f64
    };
    // group g's slice reserved for partner b: slices laid out in ascending
    // partner order over the group's strongest (k−1)·slice_len pairs
    let slice_range = |group: usize, partner: usize| -> std::ops::Range<usize> {
        let position = if partner > group { partner - 1 } else { partner };
        let start = group * group_size + position * slice_len;
        start..start + slice_len
    };

    let mut h = Vec::with_capacity(k * (k - 1) / 2);
    let mut l = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in (a + 1)..k {
            h.push(linked_in(slice_range(a, b)));
            l.push(linked_in(slice_range(b, a)));
        }
    }
    build_report(
        Pipeline::EmoStrength,
        cfg,
        h,
        l,
        "stronger-group link counts",
        "weaker-group link counts",
        m as u64,
        0,
    )
}

/// Does a friend's link make the same link more likely?
///
/// For every pair (i, j) reachable as i → k (positive) → j (chosen sign), the
/// linked indicator for (i, j) joins `f_p`; a sampled control r with no
/// chosen-sign link from the witness friend k contributes (i, r) to `f_r`.
/// Pairs reachable through several friends count once, with the smallest k
/// as witness.
pub fn diffusion_test(
    net: &SignedNetwork,
    cfg: &PipelineConfig,
) -> Result<HypothesisReport, PipelineError> {
    cfg.validate(false)?;
    let n = net.num_users();

    let mut f_p = Vec::new();
    let mut f_r = Vec::new();
    let mut enumerated = 0u64;
    let mut skipped = 0u64;
    let mut observation = 0u64;
    let mut reach: Vec<(u32, u32)> = Vec::new();
    for i in 0..n {
        reach.clear();
        for &(k, s_ik) in net.out_row(i) {
            if s_ik != Sign::Positive {
                continue;
            }
            for &(j, s_kj) in net.out_row(k as usize) {
                if s_kj == cfg.sign && j as usize != i {
                    reach.push((j, k));
                }
            }
        }
        reach.sort_unstable();
        reach.dedup_by_key(|entry| entry.0); // keeps the smallest witness k

        let i = UserId(i as u32);
        for &(j, witness) in reach.iter() {
            enumerated += 1;
            let mut rng = derive_rng(cfg.seed, TAG_DIFFUSION_CONTROL, observation);
            observation += 1;
            let witness = UserId(witness);
            let mut control = None;
            for _ in 0..cfg.sampling_attempts {
                let candidate = UserId(rng.random_range(0..n as u32));
                if candidate == i || candidate == witness {
                    continue;
                }
                if net.sign(witness, candidate) == Some(cfg.sign) {
                    continue;
                }
                control = Some(candidate);
                break;
            }
            let Some(r) = control else {
                skipped += 1;
                continue;
            };
            f_p.push(flag(net.sign(i, UserId(j)) == Some(cfg.sign)));
            f_r.push(flag(net.sign(i, r) == Some(cfg.sign)));
        }
    }

    if enumerated == 0 {
        return Err(PipelineError::NoObservations(format!(
            "no i → k (positive) → j ({}) two-step paths",
            sign_word(cfg.sign)
        )));
    }
    if f_p.is_empty() {
        return Err(PipelineError::AllSkipped(skipped));
    }
    build_report(
        Pipeline::Diffusion,
        cfg,
        f_p,
        f_r,
        "friend-endorsed link indicators",
        "control link indicators",
        enumerated,
        skipped,
    )
}

/// Do higher-ranked users establish more links of the matching sign?
///
/// Users with defined scores (optimism for positive, pessimism for negative)
/// are ranked into K equal levels. The comparison (g_a, g_b) counts
/// chosen-sign links from g_a into g_b against links from g_b into g_a
/// (swapped when counting the incoming direction), so every ordered
/// cross-group pair backs exactly one observation.
pub fn personality_test(
    net: &SignedNetwork,
    scores: &PersonalityScores,
    cfg: &PipelineConfig,
) -> Result<HypothesisReport, PipelineError> {
    cfg.validate(true)?;
    if scores.num_users() != net.num_users() {
        return Err(PipelineError::Graph(GraphError::DimensionMismatch {
            network: net.num_users(),
            emotions: scores.num_users(),
        }));
    }
    let k = cfg.k;
    let values = match cfg.sign {
        Sign::Positive => &scores.o,
        Sign::Negative => &scores.p,
    };

    let mut ranked: Vec<(u32, f64)> = values
        .iter()
        .enumerate()
        .filter_map(|(u, v)| v.filter(|x| x.is_finite()).map(|x| (u as u32, x)))
        .collect();
    let found = ranked.len();
    if found < k {
        return Err(PipelineError::InsufficientUsers { needed: k, found });
    }
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));

    let level_size = found / k;
    ranked.truncate(k * level_size);
    let mut level_of: Vec<Option<u32>> = vec![None; net.num_users()];
    for (rank, &(user, _)) in ranked.iter().enumerate() {
        level_of[user as usize] = Some((rank / level_size) as u32);
    }

    // cross-level counts of chosen-sign links, by (source level, target level)
    let mut counts = vec![0u64; k * k];
    for (u, v, s) in net.iter_links() {
        if s != cfg.sign {
            continue;
        }
        if let (Some(a), Some(b)) = (level_of[u.index()], level_of[v.index()]) {
            if a != b {
                counts[a as usize * k + b as usize] += 1;
            }
        }
    }

    let mut h = Vec::with_capacity(k * (k - 1) / 2);
    let mut l = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in (a + 1)..k {
            let (established, received) = (counts[a * k + b] as f64, counts[b * k + a] as f64);
            match cfg.direction {
                LinkDirection::Outgoing => {
                    h.push(established);
                    l.push(received);
                }
                LinkDirection::Incoming => {
                    h.push(received);
                    l.push(established);
                }
            }
        }
    }
    build_report(
        Pipeline::Personality,
        cfg,
        h,
        l,
        "higher-level link counts",
        "lower-level link counts",
        found as u64,
        0,
    )
}
