//! Sparse signed user-user network and emotion count matrices.
//!
//! Zero is always represented by absence: a stored link carries exactly one
//! sign, and a stored emotion count is strictly positive. Construction goes
//! through builders; freezing produces immutable structures with sorted
//! adjacency rows that every pipeline reads concurrently.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("self-loop rejected for user {0}")]
    SelfLoop(UserId),
    #[error("user {user} out of range (network has {num_users} users)")]
    UserOutOfRange { user: UserId, num_users: usize },
    #[error("dimension mismatch: network has {network} users, emotions have {emotions}")]
    DimensionMismatch { network: usize, emotions: usize },
    #[error("count must be >= 1 for stored emotion entries")]
    ZeroCount,
}

/// Link polarity. Absent links are "missing", never stored as zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Positive),
            -1 => Some(Sign::Negative),
            _ => None,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i8())
    }
}

/// Dense user index in [0, num_users).
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct UserId(pub u32);

impl UserId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}", self.0)
    }
}

impl From<u32> for UserId {
    fn from(v: u32) -> Self {
        UserId(v)
    }
}

fn check_user(user: UserId, num_users: usize) -> Result<(), GraphError> {
    if user.index() >= num_users {
        Err(GraphError::UserOutOfRange { user, num_users })
    } else {
        Ok(())
    }
}

/// Single-writer construction phase for [`SignedNetwork`].
///
/// Duplicate (i, j) insertions follow last-write-wins; a rewrite that changes
/// the sign is tallied as a conflict, a same-sign rewrite as a duplicate.
#[derive(Debug)]
pub struct NetworkBuilder {
    rows: Vec<HashMap<u32, Sign>>,
    conflicts: u64,
    duplicates: u64,
}

impl NetworkBuilder {
    pub fn new(num_users: usize) -> Self {
        Self {
            rows: vec![HashMap::new(); num_users],
            conflicts: 0,
            duplicates: 0,
        }
    }

    pub fn num_users(&self) -> usize {
        self.rows.len()
    }

    pub fn add_link(&mut self, from: UserId, to: UserId, sign: Sign) -> Result<(), GraphError> {
        check_user(from, self.rows.len())?;
        check_user(to, self.rows.len())?;
        if from == to {
            return Err(GraphError::SelfLoop(from));
        }
        match self.rows[from.index()].insert(to.0, sign) {
            Some(old) if old != sign => self.conflicts += 1,
            Some(_) => self.duplicates += 1,
            None => {}
        }
        Ok(())
    }

    pub fn conflicts(&self) -> u64 {
        self.conflicts
    }

    pub fn duplicates(&self) -> u64 {
        self.duplicates
    }

    /// Freeze into an immutable network with sorted adjacency.
    pub fn freeze(self) -> SignedNetwork {
        let num_users = self.rows.len();
        let mut out_rows: Vec<Vec<(u32, Sign)>> = Vec::with_capacity(num_users);
        for row in &self.rows {
            let mut entries: Vec<(u32, Sign)> = row.iter().map(|(&j, &s)| (j, s)).collect();
            entries.sort_unstable_by_key(|&(j, _)| j);
            out_rows.push(entries);
        }
        SignedNetwork::from_sorted_rows(out_rows, self.conflicts, self.duplicates)
    }
}

/// Frozen sparse signed adjacency. Immutable and safe to share across
/// threads; all queries are read-only.
#[derive(Debug, Clone)]
pub struct SignedNetwork {
    out_rows: Vec<Vec<(u32, Sign)>>,
    in_rows: Vec<Vec<(u32, Sign)>>,
    positive_links: u64,
    negative_links: u64,
    conflicts: u64,
    duplicates: u64,
}

impl SignedNetwork {
    /// Build from per-source rows already sorted by target. Rows must respect
    /// the no-self-loop and one-sign-per-pair invariants.
    pub(crate) fn from_sorted_rows(
        out_rows: Vec<Vec<(u32, Sign)>>,
        conflicts: u64,
        duplicates: u64,
    ) -> Self {
        let num_users = out_rows.len();
        debug_assert!(out_rows.iter().enumerate().all(|(i, row)| {
            row.windows(2).all(|w| w[0].0 < w[1].0)
                && row.iter().all(|&(j, _)| (j as usize) < num_users && j as usize != i)
        }));
        let mut positive_links = 0;
        let mut negative_links = 0;
        let mut in_rows: Vec<Vec<(u32, Sign)>> = vec![Vec::new(); num_users];
        for (i, row) in out_rows.iter().enumerate() {
            for &(j, s) in row {
                match s {
                    Sign::Positive => positive_links += 1,
                    Sign::Negative => negative_links += 1,
                }
                in_rows[j as usize].push((i as u32, s));
            }
        }
        // sources were visited in ascending order, so in-rows are sorted
        Self {
            out_rows,
            in_rows,
            positive_links,
            negative_links,
            conflicts,
            duplicates,
        }
    }

    pub fn num_users(&self) -> usize {
        self.out_rows.len()
    }

    pub fn positive_link_count(&self) -> u64 {
        self.positive_links
    }

    pub fn negative_link_count(&self) -> u64 {
        self.negative_links
    }

    pub fn link_count(&self) -> u64 {
        self.positive_links + self.negative_links
    }

    /// Conflicting rewrites observed while building (sign changed).
    pub fn conflict_count(&self) -> u64 {
        self.conflicts
    }

    pub fn duplicate_count(&self) -> u64 {
        self.duplicates
    }

    /// Stored sign of the ordered pair (from, to); `None` means missing.
    pub fn sign(&self, from: UserId, to: UserId) -> Option<Sign> {
        let row = self.out_rows.get(from.index())?;
        row.binary_search_by_key(&to.0, |&(j, _)| j)
            .ok()
            .map(|pos| row[pos].1)
    }

    /// Out-neighbors of `from` joined by a positive link.
    pub fn positive_out_neighbors(&self, from: UserId) -> Result<Vec<UserId>, GraphError> {
        check_user(from, self.num_users())?;
        Ok(self.out_rows[from.index()]
            .iter()
            .filter(|&&(_, s)| s == Sign::Positive)
            .map(|&(j, _)| UserId(j))
            .collect())
    }

    /// Sorted out-row of (target, sign), for internal sweeps.
    pub(crate) fn out_row(&self, from: usize) -> &[(u32, Sign)] {
        &self.out_rows[from]
    }

    pub(crate) fn in_row(&self, to: usize) -> &[(u32, Sign)] {
        &self.in_rows[to]
    }

    pub fn out_degree(&self, from: UserId) -> Result<usize, GraphError> {
        check_user(from, self.num_users())?;
        Ok(self.out_rows[from.index()].len())
    }

    /// All stored links in canonical (source, target) order.
    pub fn iter_links(&self) -> impl Iterator<Item = (UserId, UserId, Sign)> + '_ {
        self.out_rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, s)| (UserId(i as u32), UserId(j), s)))
    }

    /// A copy of the network with every sign flipped.
    pub fn sign_flipped(&self) -> SignedNetwork {
        let rows = self
            .out_rows
            .iter()
            .map(|row| row.iter().map(|&(j, s)| (j, s.flipped())).collect())
            .collect();
        SignedNetwork::from_sorted_rows(rows, self.conflicts, self.duplicates)
    }
}

/// One of the two emotion count matrices (positive or negative side).
#[derive(Debug, Clone, Default)]
pub struct CountMatrix {
    rows: Vec<Vec<(u32, u32)>>,
    col_sum: Vec<u64>,
    col_nnz: Vec<u32>,
    total_sum: u64,
    nnz: u64,
}

impl CountMatrix {
    fn from_sorted_rows(rows: Vec<Vec<(u32, u32)>>) -> Self {
        let num_users = rows.len();
        debug_assert!(rows.iter().enumerate().all(|(i, row)| {
            row.windows(2).all(|w| w[0].0 < w[1].0)
                && row
                    .iter()
                    .all(|&(j, c)| (j as usize) < num_users && j as usize != i && c >= 1)
        }));
        let mut col_sum = vec![0u64; num_users];
        let mut col_nnz = vec![0u32; num_users];
        let mut total_sum = 0u64;
        let mut nnz = 0u64;
        for row in &rows {
            for &(j, c) in row {
                col_sum[j as usize] += c as u64;
                col_nnz[j as usize] += 1;
                total_sum += c as u64;
                nnz += 1;
            }
        }
        Self {
            rows,
            col_sum,
            col_nnz,
            total_sum,
            nnz,
        }
    }

    pub fn num_users(&self) -> usize {
        self.rows.len()
    }

    /// Stored count for (from, to); 0 means absent.
    pub fn count(&self, from: UserId, to: UserId) -> u32 {
        match self.rows.get(from.index()) {
            Some(row) => row
                .binary_search_by_key(&to.0, |&(j, _)| j)
                .ok()
                .map_or(0, |pos| row[pos].1),
            None => 0,
        }
    }

    pub(crate) fn row(&self, from: usize) -> &[(u32, u32)] {
        &self.rows[from]
    }

    /// Sum of all stored counts.
    pub fn total(&self) -> u64 {
        self.total_sum
    }

    /// Number of stored (nonzero) entries.
    pub fn stored_entries(&self) -> u64 {
        self.nnz
    }

    /// Sum of stored counts received by `to`.
    pub fn column_sum(&self, to: UserId) -> u64 {
        self.col_sum[to.index()]
    }

    /// Number of distinct senders with a stored entry toward `to`.
    pub fn column_entries(&self, to: UserId) -> u32 {
        self.col_nnz[to.index()]
    }

    /// All stored entries in canonical (source, target) order.
    pub fn iter(&self) -> impl Iterator<Item = (UserId, UserId, u32)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, c)| (UserId(i as u32), UserId(j), c)))
    }
}

/// Positive and negative emotion counts between ordered user pairs.
///
/// Both sides may hold an entry for the same pair; counts are always >= 1.
#[derive(Debug, Clone)]
pub struct EmotionMatrices {
    positive: CountMatrix,
    negative: CountMatrix,
}

impl EmotionMatrices {
    /// Build from per-source sorted rows of (target, count), count >= 1.
    pub(crate) fn from_sorted_rows(
        positive: Vec<Vec<(u32, u32)>>,
        negative: Vec<Vec<(u32, u32)>>,
    ) -> Self {
        assert_eq!(positive.len(), negative.len());
        Self {
            positive: CountMatrix::from_sorted_rows(positive),
            negative: CountMatrix::from_sorted_rows(negative),
        }
    }

    pub fn empty(num_users: usize) -> Self {
        Self::from_sorted_rows(vec![Vec::new(); num_users], vec![Vec::new(); num_users])
    }

    pub fn num_users(&self) -> usize {
        self.positive.num_users()
    }

    pub fn positive(&self) -> &CountMatrix {
        &self.positive
    }

    pub fn negative(&self) -> &CountMatrix {
        &self.negative
    }

    /// The matrix matching a link sign: positive emotions pair with positive
    /// links, negative with negative.
    pub fn side(&self, sign: Sign) -> &CountMatrix {
        match sign {
            Sign::Positive => &self.positive,
            Sign::Negative => &self.negative,
        }
    }

    /// A copy with the positive and negative sides swapped.
    pub fn side_swapped(&self) -> EmotionMatrices {
        Self {
            positive: self.negative.clone(),
            negative: self.positive.clone(),
        }
    }
}

/// Raw-data statistics block: users, links per sign, emotion totals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub num_users: usize,
    pub num_positive_links: u64,
    pub num_negative_links: u64,
    pub num_positive_emotions: u64,
    pub num_negative_emotions: u64,
}

/// Dataset statistics from a frozen network and its emotion matrices.
pub fn compute_stats(
    net: &SignedNetwork,
    emotions: &EmotionMatrices,
) -> Result<DatasetStats, GraphError> {
    if net.num_users() != emotions.num_users() {
        return Err(GraphError::DimensionMismatch {
            network: net.num_users(),
            emotions: emotions.num_users(),
        });
    }
    Ok(DatasetStats {
        num_users: net.num_users(),
        num_positive_links: net.positive_link_count(),
        num_negative_links: net.negative_link_count(),
        num_positive_emotions: emotions.positive().total(),
        num_negative_emotions: emotions.negative().total(),
    })
}
