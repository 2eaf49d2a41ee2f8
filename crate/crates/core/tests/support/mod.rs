//! Independent oracles for the integration and acceptance suites.
//!
//! Everything here recomputes results by the most direct route available —
//! quadrature of the density, dense set materialization, cubic triple scans —
//! deliberately avoiding the code paths under test.

#![allow(dead_code)]

use signet_core::graph::{EmotionMatrices, Sign, SignedNetwork, UserId};
use signet_core::personality::RatingTable;
use signet_core::triads::TriadCensus;

const REL_TOL: f64 = 1e-12;

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
}

fn adapt(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = simpson(f, a, m);
    let right = simpson(f, m, b);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * REL_TOL * (left + right).abs().max(1e-300) {
        left + right + delta / 15.0
    } else {
        adapt(f, a, m, left, depth - 1) + adapt(f, m, b, right, depth - 1)
    }
}

fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let whole = simpson(&f, a, b);
    adapt(&f, a, b, whole, 48)
}

/// Unnormalized Student-t density kernel.
fn kernel(s: f64, df: f64) -> f64 {
    (1.0 + s * s / df).powf(-(df + 1.0) / 2.0)
}

/// ∫_a^∞ of the kernel: unit-width panels out to a + 60, then the remainder
/// under the substitution s = 1/u (finite range, smooth at 0 for df >= 1).
fn tail_integral(a: f64, df: f64) -> f64 {
    assert!(a >= 0.0 && df >= 1.0);
    let b = a + 60.0;
    let mut sum = 0.0;
    let mut lo = a;
    while lo < b {
        let hi = (lo + 1.0).min(b);
        sum += adaptive_simpson(|s| kernel(s, df), lo, hi);
        lo = hi;
    }
    // kernel(1/u)/u² in closed form, well-defined at u = 0
    let g = move |u: f64| {
        df.powf((df + 1.0) / 2.0) * u.powf(df - 1.0) * (1.0 + u * u * df).powf(-(df + 1.0) / 2.0)
    };
    sum + adaptive_simpson(g, 0.0, 1.0 / b)
}

/// P(T > t) by numeric integration of the t density. The normalizing
/// constant is itself computed by quadrature, so no gamma-function code is
/// shared with the implementation under test.
pub fn upper_tail_oracle(t: f64, df: f64) -> f64 {
    if t < 0.0 {
        return 1.0 - upper_tail_oracle(-t, df);
    }
    tail_integral(t, df) / (2.0 * tail_integral(0.0, df))
}

/// Rating-based scores by dense set materialization, straight from the set
/// definitions, using plain f64 averages.
pub fn naive_rating_scores(table: &RatingTable) -> (Vec<Option<f64>>, Vec<Option<f64>>) {
    let users = table.num_users();
    let items = table.num_items();
    let mut avg: Vec<Option<f64>> = vec![None; items];
    for k in 0..items as u32 {
        let mut scores = Vec::new();
        for u in 0..users as u32 {
            let s = table.score(UserId(u), k);
            if s != 0 {
                scores.push(s as f64);
            }
        }
        if !scores.is_empty() {
            avg[k as usize] = Some(scores.iter().sum::<f64>() / scores.len() as f64);
        }
    }
    let mut o = vec![None; users];
    let mut p = vec![None; users];
    for u in 0..users as u32 {
        let mut ol = Vec::new();
        let mut ph = Vec::new();
        for k in 0..items as u32 {
            let score = table.score(UserId(u), k);
            if score == 0 {
                continue;
            }
            match avg[k as usize] {
                Some(a) if a <= 3.0 => ol.push(k),
                Some(a) if a > 3.0 => ph.push(k),
                _ => {}
            }
        }
        let oh = ol
            .iter()
            .filter(|&&k| table.score(UserId(u), k) > 3)
            .count();
        let pl = ph
            .iter()
            .filter(|&&k| table.score(UserId(u), k) <= 3)
            .count();
        if !ol.is_empty() {
            o[u as usize] = Some(oh as f64 / ol.len() as f64);
        }
        if !ph.is_empty() {
            p[u as usize] = Some(pl as f64 / ph.len() as f64);
        }
    }
    (o, p)
}

/// Emotion-based scores from dense matrices and f64 averages.
pub fn naive_emotion_scores(emo: &EmotionMatrices) -> (Vec<Option<f64>>, Vec<Option<f64>>) {
    let n = emo.num_users();
    let count = |m: &signet_core::graph::CountMatrix, i: usize, j: usize| {
        m.count(UserId(i as u32), UserId(j as u32)) as f64
    };
    let mean_nonzero = |values: &[f64]| {
        let nz: Vec<f64> = values.iter().copied().filter(|&v| v != 0.0).collect();
        (!nz.is_empty()).then(|| nz.iter().sum::<f64>() / nz.len() as f64)
    };

    let mut all_p = Vec::new();
    let mut all_n = Vec::new();
    let mut recv_p: Vec<Option<f64>> = Vec::with_capacity(n);
    let mut recv_n: Vec<Option<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let col_p: Vec<f64> = (0..n).map(|i| count(emo.positive(), i, j)).collect();
        let col_n: Vec<f64> = (0..n).map(|i| count(emo.negative(), i, j)).collect();
        recv_p.push(mean_nonzero(&col_p));
        recv_n.push(mean_nonzero(&col_n));
        all_p.extend(col_p.into_iter().filter(|&v| v != 0.0));
        all_n.extend(col_n.into_iter().filter(|&v| v != 0.0));
    }
    let global_p = mean_nonzero(&all_p);
    let global_n = mean_nonzero(&all_n);

    let mut o = vec![None; n];
    let mut p = vec![None; n];
    for i in 0..n {
        let mut ol = Vec::new();
        for j in 0..n {
            if count(emo.positive(), i, j) != 0.0 {
                if let (Some(rn), Some(gn)) = (recv_n[j], global_n) {
                    if rn > gn {
                        ol.push(j);
                    }
                }
            }
        }
        let oh = ol
            .iter()
            .filter(|&&j| match recv_p[j] {
                Some(rp) => count(emo.positive(), i, j) > rp,
                None => false,
            })
            .count();
        if !ol.is_empty() {
            o[i] = Some(oh as f64 / ol.len() as f64);
        }

        let mut ph = Vec::new();
        for j in 0..n {
            if count(emo.negative(), i, j) != 0.0 {
                if let (Some(rp), Some(gp)) = (recv_p[j], global_p) {
                    if rp > gp {
                        ph.push(j);
                    }
                }
            }
        }
        let pl = ph
            .iter()
            .filter(|&&j| match recv_n[j] {
                Some(rn) => count(emo.negative(), i, j) > rn,
                None => false,
            })
            .count();
        if !ph.is_empty() {
            p[i] = Some(pl as f64 / ph.len() as f64);
        }
    }
    (o, p)
}

/// Triad census by scanning every user triple (cubic).
pub fn brute_triad_census(net: &SignedNetwork) -> TriadCensus {
    let n = net.num_users();
    let conn = |a: u32, b: u32| -> Option<Result<Sign, ()>> {
        let ab = net.sign(UserId(a), UserId(b));
        let ba = net.sign(UserId(b), UserId(a));
        match (ab, ba) {
            (None, None) => None,
            (Some(s), None) | (None, Some(s)) => Some(Ok(s)),
            (Some(x), Some(y)) if x == y => Some(Ok(x)),
            _ => Some(Err(())),
        }
    };
    let mut census = TriadCensus::default();
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            let Some(ij) = conn(i, j) else { continue };
            for k in (j + 1)..n as u32 {
                let (Some(ik), Some(jk)) = (conn(i, k), conn(j, k)) else {
                    continue;
                };
                match (ij, ik, jk) {
                    (Ok(a), Ok(b), Ok(c)) => {
                        let negatives =
                            [a, b, c].iter().filter(|s| **s == Sign::Negative).count();
                        match negatives {
                            0 => census.ppp += 1,
                            1 => census.ppn += 1,
                            2 => census.pnn += 1,
                            _ => census.nnn += 1,
                        }
                    }
                    _ => census.inconsistent += 1,
                }
            }
        }
    }
    census
}

/// Positive out-neighborhood by scanning every candidate target.
pub fn brute_positive_out(net: &SignedNetwork, i: u32) -> Vec<u32> {
    (0..net.num_users() as u32)
        .filter(|&j| net.sign(UserId(i), UserId(j)) == Some(Sign::Positive))
        .collect()
}

/// Minimal JSON-Schema checker covering the subset the report schema uses:
/// `type`, `properties`, `required`, `items`, `enum`.
pub fn check_schema(schema: &serde_json::Value, instance: &serde_json::Value) -> Result<(), String> {
    check_at(schema, instance, "$")
}

fn check_at(
    schema: &serde_json::Value,
    instance: &serde_json::Value,
    path: &str,
) -> Result<(), String> {
    use serde_json::Value;
    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(instance) {
            return Err(format!("{path}: {instance} not in enum {allowed:?}"));
        }
    }
    if let Some(ty) = schema.get("type") {
        let matches = |name: &str| match name {
            "object" => instance.is_object(),
            "array" => instance.is_array(),
            "string" => instance.is_string(),
            "integer" => instance.as_i64().is_some() || instance.as_u64().is_some(),
            "number" => instance.is_number(),
            "boolean" => instance.is_boolean(),
            "null" => instance.is_null(),
            _ => false,
        };
        let ok = match ty {
            Value::String(name) => matches(name),
            Value::Array(names) => names
                .iter()
                .filter_map(Value::as_str)
                .any(matches),
            _ => false,
        };
        if !ok {
            return Err(format!("{path}: expected type {ty}, got {instance}"));
        }
    }
    if let Some(required) = schema.get("required").and_then(Value::as_array) {
        for key in required.iter().filter_map(Value::as_str) {
            if instance.get(key).is_none() {
                return Err(format!("{path}: missing required key `{key}`"));
            }
        }
    }
    if let Some(props) = schema.get("properties").and_then(Value::as_object) {
        if let Some(obj) = instance.as_object() {
            for (key, sub) in props {
                if let Some(value) = obj.get(key) {
                    check_at(sub, value, &format!("{path}.{key}"))?;
                }
            }
        }
    }
    if let Some(items) = schema.get("items") {
        if let Some(arr) = instance.as_array() {
            for (idx, value) in arr.iter().enumerate() {
                check_at(items, value, &format!("{path}[{idx}]"))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod self_tests {
    use super::*;

    #[test]
    fn oracle_matches_high_precision_references() {
        // spot values from 60-digit arithmetic
        let refs = [
            (2.0, 10.0, 0.03669401738537018),
            (5.0, 2.0, 0.018874775675311863),
            (10.0, 100.0, 4.95084449229707e-17),
            (8.0, 1.0, 0.039583424160565546),
            (0.0, 7.0, 0.5),
        ];
        for (t, df, expect) in refs {
            let got = upper_tail_oracle(t, df);
            assert!(
                ((got - expect) / expect).abs() < 1e-10,
                "t={t} df={df}: {got} vs {expect}"
            );
        }
    }
}
