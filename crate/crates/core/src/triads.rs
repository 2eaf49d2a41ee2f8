//! Balance-theory triad census.
//!
//! Directed links are reduced to undirected connections: a pair of users is
//! connected with a definite sign when every directed link between them
//! agrees; disagreeing pairs are kept but marked inconsistent, and any
//! triangle touching one is counted separately instead of being classified.
//! Triangles are enumerated by sorted-adjacency intersection, so the cost is
//! proportional to triangles rather than user triples.

use serde::{Deserialize, Serialize};

use crate::graph::{Sign, SignedNetwork};

/// Sign multiset of a closed triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TriadKind {
    /// + + +
    Ppp,
    /// + + −
    Ppn,
    /// + − −
    Pnn,
    /// − − −
    Nnn,
}

/// A classified triad: its sign multiset and whether balance theory calls it
/// balanced (sign product positive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriadClass {
    pub kind: TriadKind,
    pub balanced: bool,
}

/// Classify a closed triple by its three connection signs.
pub fn classify_triad(s1: Sign, s2: Sign, s3: Sign) -> TriadClass {
    let negatives = [s1, s2, s3]
        .iter()
        .filter(|s| **s == Sign::Negative)
        .count();
    let kind = match negatives {
        0 => TriadKind::Ppp,
        1 => TriadKind::Ppn,
        2 => TriadKind::Pnn,
        _ => TriadKind::Nnn,
    };
    TriadClass {
        kind,
        // product of three signs is positive iff the negative count is even
        balanced: negatives % 2 == 0,
    }
}

/// Census of closed triples, bucketed by sign multiset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriadCensus {
    pub ppp: u64,
    pub ppn: u64,
    pub pnn: u64,
    pub nnn: u64,
    /// Triangles with at least one sign-conflicting reciprocal pair.
    pub inconsistent: u64,
}

impl TriadCensus {
    pub fn count(&self, kind: TriadKind) -> u64 {
        match kind {
            TriadKind::Ppp => self.ppp,
            TriadKind::Ppn => self.ppn,
            TriadKind::Pnn => self.pnn,
            TriadKind::Nnn => self.nnn,
        }
    }

    pub fn balanced_count(&self) -> u64 {
        self.ppp + self.pnn
    }

    pub fn classified_count(&self) -> u64 {
        self.ppp + self.ppn + self.pnn + self.nnn
    }

    /// All closed triples, including inconsistent ones.
    pub fn total_closed(&self) -> u64 {
        self.classified_count() + self.inconsistent
    }

    /// Balanced share of the classifiable triangles; `None` when there are none.
    pub fn balanced_fraction(&self) -> Option<f64> {
        let total = self.classified_count();
        (total > 0).then(|| self.balanced_count() as f64 / total as f64)
    }

    fn bump(&mut self, conn: [ConnSign; 3]) {
        if conn.iter().any(|c| *c == ConnSign::Inconsistent) {
            self.inconsistent += 1;
            return;
        }
        let sign = |c: ConnSign| match c {
            ConnSign::Positive => Sign::Positive,
            _ => Sign::Negative,
        };
        match classify_triad(sign(conn[0]), sign(conn[1]), sign(conn[2])).kind {
            TriadKind::Ppp => self.ppp += 1,
            TriadKind::Ppn => self.ppn += 1,
            TriadKind::Pnn => self.pnn += 1,
            TriadKind::Nnn => self.nnn += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ConnSign {
    Positive,
    Negative,
    Inconsistent,
}

impl ConnSign {
    fn from_sign(s: Sign) -> ConnSign {
        match s {
            Sign::Positive => ConnSign::Positive,
            Sign::Negative => ConnSign::Negative,
        }
    }

    fn merge(self, s: Sign) -> ConnSign {
        match (self, s) {
            (ConnSign::Positive, Sign::Positive) => ConnSign::Positive,
            (ConnSign::Negative, Sign::Negative) => ConnSign::Negative,
            _ => ConnSign::Inconsistent,
        }
    }
}

/// Undirected reduction: sorted per-node rows of (neighbor, connection sign).
fn undirected_connections(net: &SignedNetwork) -> Vec<Vec<(u32, ConnSign)>> {
    let n = net.num_users();
    let mut rows: Vec<Vec<(u32, ConnSign)>> = vec![Vec::new(); n];
    for i in 0..n {
        // merge out- and in-links of i toward higher-indexed neighbors only;
        // the mirror entry is pushed to both endpoints
        let fold = |j: u32, s: Sign, row: &mut Vec<(u32, ConnSign)>| {
            match row.last_mut() {
                Some((last, conn)) if *last == j => *conn = conn.merge(s),
                _ => row.push((j, ConnSign::from_sign(s))),
            }
        };
        let out = net.out_row(i);
        let inc = net.in_row(i);
        let (mut a, mut b) = (0, 0);
        let mut merged: Vec<(u32, ConnSign)> = Vec::new();
        while a < out.len() || b < inc.len() {
            let next_out = out.get(a).map(|&(j, _)| j);
            let next_in = inc.get(b).map(|&(j, _)| j);
            match (next_out, next_in) {
                (Some(jo), Some(ji)) if jo == ji => {
                    fold(jo, out[a].1, &mut merged);
                    fold(ji, inc[b].1, &mut merged);
                    a += 1;
                    b += 1;
                }
                (Some(jo), Some(ji)) if jo < ji => {
                    fold(jo, out[a].1, &mut merged);
                    a += 1;
                }
                (Some(_), Some(_)) | (None, Some(_)) => {
                    fold(next_in.unwrap(), inc[b].1, &mut merged);
                    b += 1;
                }
                (Some(_), None) => {
                    fold(next_out.unwrap(), out[a].1, &mut merged);
                    a += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        rows[i] = merged;
    }
    rows
}

/// Count every fully connected user triple, bucketed by sign multiset.
pub fn triad_census(net: &SignedNetwork) -> TriadCensus {
    let rows = undirected_connections(net);
    let mut census = TriadCensus::default();
    // for each connection (u, v) with u < v, intersect the neighbor rows
    // above v to close each triangle exactly once (u < v < w)
    for (u, row) in rows.iter().enumerate() {
        for &(v, s_uv) in row.iter().filter(|&&(v, _)| v as usize > u) {
            let row_v = &rows[v as usize];
            let (mut a, mut b) = (0, 0);
            let row_u = row;
            while a < row_u.len() && b < row_v.len() {
                let (wu, s_uw) = row_u[a];
                let (wv, s_vw) = row_v[b];
                if wu <= v {
                    a += 1;
                    continue;
                }
                if wv <= v {
                    b += 1;
                    continue;
                }
                match wu.cmp(&wv) {
                    std::cmp::Ordering::Less => a += 1,
                    std::cmp::Ordering::Greater => b += 1,
                    std::cmp::Ordering::Equal => {
                        census.bump([s_uv, s_uw, s_vw]);
                        a += 1;
                        b += 1;
                    }
                }
            }
        }
    }
    census
}
