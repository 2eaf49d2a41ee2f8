//! Optimism and pessimism scores.
//!
//! Rating-based form: how often a user rates above the crowd on items whose
//! average is low (optimism), and below the crowd on items whose average is
//! high (pessimism). Emotion-based form: the same idea over emotion counts,
//! with per-target received averages standing in for item averages.
//!
//! All threshold comparisons are done in integer arithmetic (cross
//! multiplication instead of dividing), so scores are exact and invariant
//! under uniform scaling of counts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EmotionMatrices, UserId};

#[derive(Debug, Error, PartialEq)]
pub enum RatingError {
    #[error("entry {index}: score {score} outside [1, 5]")]
    ScoreOutOfRange { index: usize, score: u8 },
    #[error("entry {index}: user {user} out of range ({num_users} users)")]
    UserOutOfRange {
        index: usize,
        user: u32,
        num_users: usize,
    },
    #[error("entry {index}: item {item} out of range ({num_items} items)")]
    ItemOutOfRange {
        index: usize,
        item: u32,
        num_items: usize,
    },
}

/// Sparse user-by-item rating table with scores in {1..5}; 0 (unrated) is
/// represented by absence.
#[derive(Debug, Clone)]
pub struct RatingTable {
    rows: Vec<Vec<(u32, u8)>>,
    num_items: usize,
    duplicates: u64,
}

impl RatingTable {
    /// Build from (user, item, score) entries. A repeated (user, item) pair
    /// follows last-write-wins and is tallied in `duplicates()`.
    pub fn from_entries(
        num_users: usize,
        num_items: usize,
        entries: impl IntoIterator<Item = (u32, u32, u8)>,
    ) -> Result<RatingTable, RatingError> {
        let mut rows: Vec<Vec<(u32, u8)>> = vec![Vec::new(); num_users];
        let mut duplicates = 0;
        for (index, (user, item, score)) in entries.into_iter().enumerate() {
            if user as usize >= num_users {
                return Err(RatingError::UserOutOfRange {
                    index,
                    user,
                    num_users,
                });
            }
            if item as usize >= num_items {
                return Err(RatingError::ItemOutOfRange {
                    index,
                    item,
                    num_items,
                });
            }
            if !(1..=5).contains(&score) {
                return Err(RatingError::ScoreOutOfRange { index, score });
            }
            let row = &mut rows[user as usize];
            match row.iter_mut().find(|(k, _)| *k == item) {
                Some((_, s)) => {
                    *s = score;
                    duplicates += 1;
                }
                None => row.push((item, score)),
            }
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|&(k, _)| k);
        }
        Ok(RatingTable {
            rows,
            num_items,
            duplicates,
        })
    }

    pub fn num_users(&self) -> usize {
        self.rows.len()
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn duplicates(&self) -> u64 {
        self.duplicates
    }

    /// Score user gave item, or 0 if unrated.
    pub fn score(&self, user: UserId, item: u32) -> u8 {
        match self.rows.get(user.index()) {
            Some(row) => row
                .binary_search_by_key(&item, |&(k, _)| k)
                .ok()
                .map_or(0, |pos| row[pos].1),
            None => 0,
        }
    }

    pub fn ratings_of(&self, user: UserId) -> &[(u32, u8)] {
        &self.rows[user.index()]
    }

    pub fn rating_count(&self) -> u64 {
        self.rows.iter().map(|r| r.len() as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (UserId, u32, u8)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |&(k, s)| (UserId(u as u32), k, s)))
    }
}

/// Per-item mean scores, kept as exact (sum, count) pairs.
#[derive(Debug, Clone)]
pub struct ItemAverages {
    sums: Vec<u64>,
    counts: Vec<u32>,
}

impl ItemAverages {
    pub fn rater_count(&self, item: u32) -> u32 {
        self.counts[item as usize]
    }

    /// Mean score of an item, or `None` if nobody rated it.
    pub fn average(&self, item: u32) -> Option<f64> {
        let c = self.counts[item as usize];
        (c > 0).then(|| self.sums[item as usize] as f64 / c as f64)
    }

    /// Rated and average <= 3, compared exactly as sum <= 3·count.
    pub fn is_low(&self, item: u32) -> bool {
        let c = self.counts[item as usize] as u64;
        c > 0 && self.sums[item as usize] <= 3 * c
    }

    /// Rated and average > 3.
    pub fn is_high(&self, item: u32) -> bool {
        let c = self.counts[item as usize] as u64;
        c > 0 && self.sums[item as usize] > 3 * c
    }
}

/// Mean rating per item over the users who rated it.
pub fn item_averages(table: &RatingTable) -> ItemAverages {
    let mut sums = vec![0u64; table.num_items()];
    let mut counts = vec![0u32; table.num_items()];
    for (_, item, score) in table.iter() {
        sums[item as usize] += score as u64;
        counts[item as usize] += 1;
    }
    ItemAverages { sums, counts }
}

/// Per-user optimism/pessimism with the set sizes behind each ratio.
///
/// A score is `None` when its denominator set is empty; such users are
/// excluded from ranking pipelines rather than treated as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonalityScores {
    pub o: Vec<Option<f64>>,
    pub p: Vec<Option<f64>>,
    /// |OL_i|: denominator of the optimism ratio.
    pub ol_size: Vec<u32>,
    /// |OH_i|: numerator of the optimism ratio.
    pub oh_size: Vec<u32>,
    /// |PH_i|: denominator of the pessimism ratio.
    pub ph_size: Vec<u32>,
    /// |PL_i|: numerator of the pessimism ratio.
    pub pl_size: Vec<u32>,
}

impl PersonalityScores {
    pub fn num_users(&self) -> usize {
        self.o.len()
    }

    /// Wrap externally computed scores (e.g. latent ground truth) so they
    /// can drive the ranking pipelines. Set sizes are not meaningful here.
    pub fn from_values(o: Vec<Option<f64>>, p: Vec<Option<f64>>) -> PersonalityScores {
        let n = o.len();
        assert_eq!(n, p.len());
        PersonalityScores {
            o,
            p,
            ol_size: vec![0; n],
            oh_size: vec![0; n],
            ph_size: vec![0; n],
            pl_size: vec![0; n],
        }
    }

    pub fn defined_o(&self) -> usize {
        self.o.iter().filter(|v| v.is_some()).count()
    }

    pub fn defined_p(&self) -> usize {
        self.p.iter().filter(|v| v.is_some()).count()
    }

    /// Swap the optimism and pessimism sides (the sign mirror).
    pub fn side_swapped(&self) -> PersonalityScores {
        PersonalityScores {
            o: self.p.clone(),
            p: self.o.clone(),
            ol_size: self.ph_size.clone(),
            oh_size: self.pl_size.clone(),
            ph_size: self.ol_size.clone(),
            pl_size: self.oh_size.clone(),
        }
    }
}

/// Rating-based scores.
///
/// OL_i: items user i rated whose average is low (<= 3). OH_i: those i still
/// scored high (> 3); o_i = |OH_i| / |OL_i|. PH_i: items i rated whose
/// average is high (> 3). PL_i: those i scored low (<= 3); p_i = |PL_i| / |PH_i|.
pub fn rating_based_scores(table: &RatingTable) -> PersonalityScores {
    let averages = item_averages(table);
    let n = table.num_users();
    let mut scores = PersonalityScores {
        o: vec![None; n],
        p: vec![None; n],
        ol_size: vec![0; n],
        oh_size: vec![0; n],
        ph_size: vec![0; n],
        pl_size: vec![0; n],
    };
    for (u, row) in table.rows.iter().enumerate() {
        let (mut ol, mut oh, mut ph, mut pl) = (0u32, 0u32, 0u32, 0u32);
        for &(item, score) in row {
            if averages.is_low(item) {
                ol += 1;
                if score > 3 {
                    oh += 1;
                }
            } else if averages.is_high(item) {
                ph += 1;
                if score <= 3 {
                    pl += 1;
                }
            }
        }
        scores.ol_size[u] = ol;
        scores.oh_size[u] = oh;
        scores.ph_size[u] = ph;
        scores.pl_size[u] = pl;
        if ol > 0 {
            scores.o[u] = Some(oh as f64 / ol as f64);
        }
        if ph > 0 {
            scores.p[u] = Some(pl as f64 / ph as f64);
        }
    }
    scores
}

/// Exact-threshold view over the emotion matrices.
///
/// "Received" averages are per-target means over stored entries; "global"
/// averages are over all stored entries of one side. Comparisons cross
/// multiply in u128 so they are exact and scale invariant.
#[derive(Debug, Clone)]
pub struct EmotionAverages {
    p_total: u64,
    p_nnz: u64,
    n_total: u64,
    n_nnz: u64,
    p_col_sum: Vec<u64>,
    p_col_nnz: Vec<u32>,
    n_col_sum: Vec<u64>,
    n_col_nnz: Vec<u32>,
}

impl EmotionAverages {
    pub fn from_matrices(emotions: &EmotionMatrices) -> EmotionAverages {
        let n = emotions.num_users();
        let mut ea = EmotionAverages {
            p_total: emotions.positive().total(),
            p_nnz: emotions.positive().stored_entries(),
            n_total: emotions.negative().total(),
            n_nnz: emotions.negative().stored_entries(),
            p_col_sum: Vec::with_capacity(n),
            p_col_nnz: Vec::with_capacity(n),
            n_col_sum: Vec::with_capacity(n),
            n_col_nnz: Vec::with_capacity(n),
        };
        for j in 0..n {
            let j = UserId(j as u32);
            ea.p_col_sum.push(emotions.positive().column_sum(j));
            ea.p_col_nnz.push(emotions.positive().column_entries(j));
            ea.n_col_sum.push(emotions.negative().column_sum(j));
            ea.n_col_nnz.push(emotions.negative().column_entries(j));
        }
        ea
    }

    /// Mean of all stored positive counts, if any exist.
    pub fn global_positive(&self) -> Option<f64> {
        (self.p_nnz > 0).then(|| self.p_total as f64 / self.p_nnz as f64)
    }

    pub fn global_negative(&self) -> Option<f64> {
        (self.n_nnz > 0).then(|| self.n_total as f64 / self.n_nnz as f64)
    }

    pub fn received_positive(&self, j: UserId) -> Option<f64> {
        let c = self.p_col_nnz[j.index()];
        (c > 0).then(|| self.p_col_sum[j.index()] as f64 / c as f64)
    }

    pub fn received_negative(&self, j: UserId) -> Option<f64> {
        let c = self.n_col_nnz[j.index()];
        (c > 0).then(|| self.n_col_sum[j.index()] as f64 / c as f64)
    }

    /// received_N(j) > global_N, exactly; false when either side is undefined.
    pub fn received_negative_above_global(&self, j: u32) -> bool {
        let nnz_j = self.n_col_nnz[j as usize] as u128;
        nnz_j > 0
            && self.n_nnz > 0
            && (self.n_col_sum[j as usize] as u128) * (self.n_nnz as u128)
                > (self.n_total as u128) * nnz_j
    }

    /// received_P(j) > global_P, exactly.
    pub fn received_positive_above_global(&self, j: u32) -> bool {
        let nnz_j = self.p_col_nnz[j as usize] as u128;
        nnz_j > 0
            && self.p_nnz > 0
            && (self.p_col_sum[j as usize] as u128) * (self.p_nnz as u128)
                > (self.p_total as u128) * nnz_j
    }

    /// count > received_P(j), exactly; false when j has no received entries.
    pub fn count_above_received_positive(&self, count: u32, j: u32) -> bool {
        let nnz_j = self.p_col_nnz[j as usize] as u128;
        nnz_j > 0 && (count as u128) * nnz_j > self.p_col_sum[j as usize] as u128
    }

    pub fn count_above_received_negative(&self, count: u32, j: u32) -> bool {
        let nnz_j = self.n_col_nnz[j as usize] as u128;
        nnz_j > 0 && (count as u128) * nnz_j > self.n_col_sum[j as usize] as u128
    }
}

/// Emotion-based scores.
///
/// OL_i: targets of i's positive emotions that receive above-global-average
/// negative emotions. OH_i: those i favored above their received-positive
/// average; o_i = |OH_i| / |OL_i|. PH_i / PL_i mirror this on the negative
/// side; p_i = |PL_i| / |PH_i|.
pub fn emotion_based_scores(emotions: &EmotionMatrices) -> PersonalityScores {
    let averages = EmotionAverages::from_matrices(emotions);
    let n = emotions.num_users();
    let mut scores = PersonalityScores {
        o: vec![None; n],
        p: vec![None; n],
        ol_size: vec![0; n],
        oh_size: vec![0; n],
        ph_size: vec![0; n],
        pl_size: vec![0; n],
    };
    for i in 0..n {
        let (mut ol, mut oh) = (0u32, 0u32);
        for &(j, count) in emotions.positive().row(i) {
            if averages.received_negative_above_global(j) {
                ol += 1;
                if averages.count_above_received_positive(count, j) {
                    oh += 1;
                }
            }
        }
        let (mut ph, mut pl) = (0u32, 0u32);
        for &(j, count) in emotions.negative().row(i) {
            if averages.received_positive_above_global(j) {
                ph += 1;
                if averages.count_above_received_negative(count, j) {
                    pl += 1;
                }
            }
        }
        scores.ol_size[i] = ol;
        scores.oh_size[i] = oh;
        scores.ph_size[i] = ph;
        scores.pl_size[i] = pl;
        if ol > 0 {
            scores.o[i] = Some(oh as f64 / ol as f64);
        }
        if ph > 0 {
            scores.p[i] = Some(pl as f64 / ph as f64);
        }
    }
    scores
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EmotionMatrices;

    #[test]
    fn item_average_of_two_ratings() {
        let table = RatingTable::from_entries(2, 1, [(0, 0, 2), (1, 0, 4)]).unwrap();
        let avg = item_averages(&table);
        assert_eq!(avg.average(0), Some(3.0));
        assert_eq!(avg.rater_count(0), 2);
        // boundary: exactly 3.0 counts as low, not high
        assert!(avg.is_low(0));
        assert!(!avg.is_high(0));
    }

    #[test]
    fn unrated_item_is_undefined() {
        let table = RatingTable::from_entries(2, 2, [(0, 0, 5)]).unwrap();
        let avg = item_averages(&table);
        assert_eq!(avg.average(1), None);
        assert!(!avg.is_low(1));
        assert!(!avg.is_high(1));
    }

    #[test]
    fn ten_item_fixture_matches_hand_arithmetic() {
        // items 0..4 rated by two users each; averages by hand:
        // item0 {1,2}=1.5  item1 {3,3}=3.0  item2 {4,5}=4.5  item3 {2,5}=3.5  item4 {1,5}=3.0
        let entries = [
            (0, 0, 1),
            (1, 0, 2),
            (0, 1, 3),
            (1, 1, 3),
            (0, 2, 4),
            (1, 2, 5),
            (0, 3, 2),
            (1, 3, 5),
            (0, 4, 1),
            (1, 4, 5),
        ];
        let table = RatingTable::from_entries(2, 5, entries).unwrap();
        let avg = item_averages(&table);
        for (item, expect) in [(0, 1.5), (1, 3.0), (2, 4.5), (3, 3.5), (4, 3.0)] {
            assert_eq!(avg.average(item), Some(expect), "item {item}");
        }
    }

    #[test]
    fn optimism_two_thirds_fixture() {
        // user 0 rates three low-average items with {4, 5, 2} → o = 2/3 exactly.
        // Items get low averages via a second user rating them 1.
        let entries = [
            (0, 0, 4),
            (0, 1, 5),
            (0, 2, 2),
            (1, 0, 1),
            (1, 1, 1),
            (1, 2, 1),
        ];
        let table = RatingTable::from_entries(2, 3, entries).unwrap();
        let avg = item_averages(&table);
        assert!(avg.is_low(0) && avg.is_low(1) && avg.is_low(2));
        let scores = rating_based_scores(&table);
        assert_eq!(scores.ol_size[0], 3);
        assert_eq!(scores.oh_size[0], 2);
        assert_eq!(scores.o[0], Some(2.0 / 3.0));
    }

    #[test]
    fn high_only_rater_has_undefined_optimism() {
        // both items average > 3, so OL is empty for everyone
        let entries = [(0, 0, 5), (0, 1, 4), (1, 0, 4), (1, 1, 5)];
        let table = RatingTable::from_entries(2, 2, entries).unwrap();
        let scores = rating_based_scores(&table);
        assert_eq!(scores.o[0], None);
        assert_eq!(scores.ol_size[0], 0);
        // every rating on high-average items is <= 3 → p = 1
        let entries = [(0, 0, 3), (0, 1, 2), (1, 0, 5), (1, 1, 5)];
        let table = RatingTable::from_entries(2, 2, entries).unwrap();
        let scores = rating_based_scores(&table);
        assert_eq!(scores.p[0], Some(1.0));
        assert_eq!(scores.ph_size[0], 2);
        assert_eq!(scores.pl_size[0], 2);
    }

    #[test]
    fn rating_errors_carry_entry_index() {
        assert_eq!(
            RatingTable::from_entries(2, 2, [(0, 0, 6)]).unwrap_err(),
            RatingError::ScoreOutOfRange { index: 0, score: 6 }
        );
        assert!(matches!(
            RatingTable::from_entries(2, 2, [(0, 0, 3), (2, 0, 3)]).unwrap_err(),
            RatingError::UserOutOfRange { index: 1, .. }
        ));
        assert!(matches!(
            RatingTable::from_entries(2, 2, [(0, 5, 3)]).unwrap_err(),
            RatingError::ItemOutOfRange { index: 0, .. }
        ));
    }

    #[test]
    fn duplicate_rating_last_write_wins() {
        let table = RatingTable::from_entries(1, 1, [(0, 0, 2), (0, 0, 5)]).unwrap();
        assert_eq!(table.score(UserId(0), 0), 5);
        assert_eq!(table.duplicates(), 1);
    }

    /// 4-user fixture with hand-enumerated OL/OH/PH/PL sets.
    ///
    /// P entries: (0→1, 5), (0→2, 1), (3→1, 1), (3→2, 3)
    /// N entries: (0→1, 2), (2→1, 4), (0→3, 1)
    /// Global P̄ = 10/4 = 2.5; global N̄ = 7/3.
    /// Received N̄: user1 = (2+4)/2 = 3 > 7/3 ✓; user2 undefined; user3 = 1 < 7/3.
    /// Received P̄: user1 = (5+1)/2 = 3 > 2.5 ✓; user2 = (1+3)/2 = 2; user3 undefined.
    fn hand_fixture() -> EmotionMatrices {
        EmotionMatrices::from_sorted_rows(
            vec![vec![(1, 5), (2, 1)], vec![], vec![], vec![(1, 1), (2, 3)]],
            vec![vec![(1, 2), (3, 1)], vec![], vec![(1, 4)], vec![]],
        )
    }

    #[test]
    fn emotion_scores_match_hand_enumeration() {
        let scores = emotion_based_scores(&hand_fixture());
        // OL_0 = {1} (N̄_1 = 3 > 7/3; user 2 has no received-N). P_01 = 5 > P̄_1 = 3 → OH_0 = {1}.
        assert_eq!(scores.o[0], Some(1.0));
        assert_eq!((scores.ol_size[0], scores.oh_size[0]), (1, 1));
        // OL_3 = {1}; P_31 = 1 < 3 → OH_3 = ∅ → o_3 = 0.
        assert_eq!(scores.o[3], Some(0.0));
        // users 1, 2 send no positive emotions → undefined
        assert_eq!(scores.o[1], None);
        assert_eq!(scores.o[2], None);
        // PH_0: targets of N_0 = {1, 3}; P̄_1 = 3 > 2.5 ✓; user 3 has no received-P → PH_0 = {1}.
        // N_01 = 2 < N̄_1 = 3 → PL_0 = ∅ → p_0 = 0.
        assert_eq!(scores.p[0], Some(0.0));
        assert_eq!((scores.ph_size[0], scores.pl_size[0]), (1, 0));
        // PH_2 = {1}; N_21 = 4 > 3 → PL_2 = {1} → p_2 = 1.
        assert_eq!(scores.p[2], Some(1.0));
    }

    #[test]
    fn no_outgoing_positive_emotions_means_undefined_o() {
        let emo = EmotionMatrices::from_sorted_rows(
            vec![vec![], vec![(0, 2)]],
            vec![vec![(1, 1)], vec![]],
        );
        let scores = emotion_based_scores(&emo);
        assert_eq!(scores.o[0], None);
    }

    #[test]
    fn target_below_average_negativity_leaves_ol_empty() {
        // user 0's single positive emotion targets user 1, whose received
        // negativity (1) is below the global mean (avg of {1, 9} = 5).
        let emo = EmotionMatrices::from_sorted_rows(
            vec![vec![(1, 2)], vec![], vec![]],
            vec![vec![(1, 1)], vec![(2, 9)], vec![]],
        );
        let scores = emotion_based_scores(&emo);
        assert_eq!(scores.ol_size[0], 0);
        assert_eq!(scores.o[0], None);
    }

    #[test]
    fn uniform_scaling_preserves_scores_exactly() {
        let base = hand_fixture();
        let scores = emotion_based_scores(&base);
        for factor in [2u32, 3, 7, 100] {
            let scale = |rows: &CountMatrixRows| -> Vec<Vec<(u32, u32)>> {
                rows.iter()
                    .map(|row| row.iter().map(|&(j, c)| (j, c * factor)).collect())
                    .collect()
            };
            let p_rows: CountMatrixRows =
                (0..4).map(|i| base.positive().row(i).to_vec()).collect();
            let n_rows: CountMatrixRows =
                (0..4).map(|i| base.negative().row(i).to_vec()).collect();
            let scaled = EmotionMatrices::from_sorted_rows(scale(&p_rows), scale(&n_rows));
            assert_eq!(emotion_based_scores(&scaled), scores, "factor {factor}");
        }
    }

    type CountMatrixRows = Vec<Vec<(u32, u32)>>;

    #[test]
    fn subset_relations_hold() {
        let scores = emotion_based_scores(&hand_fixture());
        for i in 0..scores.num_users() {
            assert!(scores.oh_size[i] <= scores.ol_size[i]);
            assert!(scores.pl_size[i] <= scores.ph_size[i]);
            if let Some(o) = scores.o[i] {
                assert!((0.0..=1.0).contains(&o));
            }
            if let Some(p) = scores.p[i] {
                assert!((0.0..=1.0).contains(&p));
            }
        }
    }
}
