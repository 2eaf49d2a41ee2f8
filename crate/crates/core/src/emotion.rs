//! Emotion matrices from raw emotion events.
//!
//! Two event shapes are supported: helpfulness scores on a 1–6 scale
//! (product-review style) and pre-labeled positive/negative polarity
//! (comment-sentiment style). Scores map as {1,2} → negative, {4,5,6} →
//! positive, 3 → neutral and dropped (but tallied).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EmotionMatrices, UserId};

#[derive(Debug, Error, PartialEq)]
pub enum EmotionError {
    #[error("event {index}: score {score} outside [1, 6]")]
    ScoreOutOfRange { index: usize, score: u8 },
    #[error("event {index}: self-directed emotion for user {user}")]
    SelfDirected { index: usize, user: UserId },
    #[error("event {index}: user {user} out of range ({num_users} users)")]
    UserOutOfRange {
        index: usize,
        user: UserId,
        num_users: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

/// How the emotion was expressed: a helpfulness score or a polarity label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expression {
    /// Helpfulness rating in [1, 6].
    Score(u8),
    /// Pre-labeled comment sentiment.
    Polarity(Polarity),
}

/// One emotion expressed by `rater` toward `ratee`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UserEmotionEvent {
    pub rater: UserId,
    pub ratee: UserId,
    pub expression: Expression,
}

/// Tallies from one matrix build.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmotionBuildSummary {
    pub positive_events: u64,
    pub negative_events: u64,
    /// Score-3 events: reported, never stored.
    pub neutral_dropped: u64,
}

/// Accumulate events into positive/negative count matrices.
///
/// Order-invariant: counts are event multiplicities. Every invalid event
/// aborts the build with its index.
pub fn build_emotion_matrices(
    events: &[UserEmotionEvent],
    num_users: usize,
) -> Result<(EmotionMatrices, EmotionBuildSummary), EmotionError> {
    let mut pos: Vec<Vec<(u32, u32)>> = vec![Vec::new(); num_users];
    let mut neg: Vec<Vec<(u32, u32)>> = vec![Vec::new(); num_users];
    let mut summary = EmotionBuildSummary::default();

    for (index, ev) in events.iter().enumerate() {
        for user in [ev.rater, ev.ratee] {
            if user.index() >= num_users {
                return Err(EmotionError::UserOutOfRange {
                    index,
                    user,
                    num_users,
                });
            }
        }
        if ev.rater == ev.ratee {
            return Err(EmotionError::SelfDirected {
                index,
                user: ev.rater,
            });
        }
        let polarity = match ev.expression {
            Expression::Score(s) => match s {
                1 | 2 => Some(Polarity::Negative),
                3 => None,
                4..=6 => Some(Polarity::Positive),
                _ => return Err(EmotionError::ScoreOutOfRange { index, score: s }),
            },
            Expression::Polarity(p) => Some(p),
        };
        match polarity {
            Some(Polarity::Positive) => {
                summary.positive_events += 1;
                bump(&mut pos[ev.rater.index()], ev.ratee.0);
            }
            Some(Polarity::Negative) => {
                summary.negative_events += 1;
                bump(&mut neg[ev.rater.index()], ev.ratee.0);
            }
            None => summary.neutral_dropped += 1,
        }
    }

    for rows in [&mut pos, &mut neg] {
        for row in rows.iter_mut() {
            row.sort_unstable_by_key(|&(j, _)| j);
        }
    }
    Ok((EmotionMatrices::from_sorted_rows(pos, neg), summary))
}

/// Increment the count for `target` in an (unsorted) accumulation row.
fn bump(row: &mut Vec<(u32, u32)>, target: u32) {
    match row.iter_mut().find(|(j, _)| *j == target) {
        Some((_, c)) => *c += 1,
        None => row.push((target, 1)),
    }
}
