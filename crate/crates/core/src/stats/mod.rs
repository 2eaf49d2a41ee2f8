//! One-sided two-sample Welch t-test with extreme-tail p-values.
//!
//! The tail probability is computed through the regularized incomplete beta
//! function, with a log-space path so that p-values far below f64's
//! underflow threshold still report a finite log10.

pub mod special;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("sample `{0}` needs at least two observations")]
    TooFewObservations(String),
    #[error("sample `{0}` contains a non-finite value")]
    NonFiniteValue(String),
    #[error("degenerate samples: both variances are zero")]
    DegenerateSamples,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("continued fraction did not converge")]
    NoConvergence,
}

/// A vector of observations with a provenance label for diagnostics.
#[derive(Debug, Clone)]
pub struct Sample {
    values: Vec<f64>,
    label: String,
}

impl Sample {
    pub fn new(values: Vec<f64>, label: impl Into<String>) -> Self {
        Self {
            values,
            label: label.into(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Unbiased sample variance (n − 1 denominator).
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let ss: f64 = self.values.iter().map(|v| (v - m) * (v - m)).sum();
        ss / (self.values.len() - 1) as f64
    }

    fn validate(&self) -> Result<(), StatsError> {
        if self.values.len() < 2 {
            return Err(StatsError::TooFewObservations(self.label.clone()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFiniteValue(self.label.clone()));
        }
        Ok(())
    }
}

/// Outcome of a one-sided two-sample test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub t_statistic: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub degrees_of_freedom: f64,
    /// One-sided upper-tail probability P(T > t).
    pub p_value: f64,
    /// log10 of the p-value, finite even when `p_value` underflows to 0.
    pub log10_p_value: f64,
    pub alpha: f64,
    pub rejected: bool,
    pub n1: usize,
    pub n2: usize,
}

/// Welch t statistic and Welch–Satterthwaite degrees of freedom.
///
/// Requires both samples to have at least two finite observations and at
/// least one to have nonzero variance.
pub fn welch_t(a: &Sample, b: &Sample) -> Result<(f64, f64), StatsError> {
    a.validate()?;
    b.validate()?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (a.variance(), b.variance());
    if va == 0.0 && vb == 0.0 {
        return Err(StatsError::DegenerateSamples);
    }
    let sa = va / na;
    let sb = vb / nb;
    let t = (a.mean() - b.mean()) / (sa + sb).sqrt();
    let df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    Ok((t, df))
}

/// Upper-tail probability P(T > t) for Student's t with `df` degrees of
/// freedom, accurate deep into the tail.
pub fn student_t_upper_tail(t: f64, df: f64) -> Result<f64, StatsError> {
    if !t.is_finite() || !df.is_finite() || df <= 0.0 {
        return Err(StatsError::InvalidArgument(format!(
            "upper tail needs finite t and df > 0; got t={t}, df={df}"
        )));
    }
    if t == 0.0 {
        return Ok(0.5);
    }
    let x = df / (df + t * t);
    let half_tail = special::regularized_beta(df / 2.0, 0.5, x)? / 2.0;
    Ok(if t > 0.0 { half_tail } else { 1.0 - half_tail })
}

/// Natural log of P(T > t), finite even where the linear value underflows.
pub fn ln_student_t_upper_tail(t: f64, df: f64) -> Result<f64, StatsError> {
    if !t.is_finite() || !df.is_finite() || df <= 0.0 {
        return Err(StatsError::InvalidArgument(format!(
            "upper tail needs finite t and df > 0; got t={t}, df={df}"
        )));
    }
    if t == 0.0 {
        return Ok(0.5f64.ln());
    }
    let x = df / (df + t * t);
    if t > 0.0 {
        Ok(special::ln_regularized_beta(df / 2.0, 0.5, x)? - std::f64::consts::LN_2)
    } else {
        // 1 − I_x/2 is never small; the linear route is exact enough.
        let half_tail = special::regularized_beta(df / 2.0, 0.5, x)? / 2.0;
        Ok((-half_tail).ln_1p())
    }
}

/// One-sided Welch test of H0: mean(h) <= mean(l) against H1: mean(h) > mean(l).
pub fn one_sided_test(h: &Sample, l: &Sample, alpha: f64) -> Result<TestResult, StatsError> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(StatsError::InvalidArgument(format!(
            "alpha must be in (0, 1); got {alpha}"
        )));
    }
    let (t, df) = welch_t(h, l)?;
    let p_value = student_t_upper_tail(t, df)?;
    let log10_p_value = ln_student_t_upper_tail(t, df)? / std::f64::consts::LN_10;
    Ok(TestResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value,
        log10_p_value,
        alpha,
        rejected: p_value < alpha,
        n1: h.len(),
        n2: l.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(values: &[f64]) -> Sample {
        Sample::new(values.to_vec(), "test")
    }

    // Reference tail values computed by 60-digit quadrature of the t density.
    const TAIL_REFS: &[(f64, f64, f64)] = &[
        (2.0, 10.0, 0.03669401738537018),
        (5.0, 2.0, 0.018874775675311863),
        (-3.0, 7.0, 0.9900289369340037),
        (10.0, 100.0, 4.95084449229707e-17),
        (8.0, 1.0, 0.039583424160565546),
        (std::f64::consts::SQRT_2, 6.0, 0.103515625), // exactly 53/512
    ];

    #[test]
    fn upper_tail_matches_references() {
        for &(t, df, expect) in TAIL_REFS {
            let got = student_t_upper_tail(t, df).unwrap();
            let rel = ((got - expect) / expect).abs();
            assert!(rel < 1e-12, "t={t} df={df}: got {got}, want {expect}");
        }
    }

    #[test]
    fn upper_tail_symmetry_and_limits() {
        assert_eq!(student_t_upper_tail(0.0, 3.0).unwrap(), 0.5);
        for &(t, df) in &[(1.3, 4.0), (2.7, 11.0), (6.0, 2.5)] {
            let up = student_t_upper_tail(t, df).unwrap();
            let down = student_t_upper_tail(-t, df).unwrap();
            assert!((up + down - 1.0).abs() < 1e-15);
        }
        assert!(student_t_upper_tail(1e8, 5.0).unwrap() < 1e-30);
        assert!(student_t_upper_tail(-1e8, 5.0).unwrap() > 1.0 - 1e-12);
        assert!(student_t_upper_tail(f64::NAN, 5.0).is_err());
        assert!(student_t_upper_tail(f64::INFINITY, 5.0).is_err());
        assert!(student_t_upper_tail(1.0, 0.0).is_err());
    }

    #[test]
    fn log_tail_matches_quadrature_deep_in_tail() {
        // ln P(T > t) references from 60-digit quadrature.
        let refs = [
            (50.0, 1e5, -1239.4496468437254),
            (40.0, 1e5, -798.2679656412455),
            (50.0, 10.0, -29.720791687120556),
            (20.0, 5.0, -12.755030070836757),
        ];
        for (t, df, expect) in refs {
            let got = ln_student_t_upper_tail(t, df).unwrap();
            let rel = ((got - expect) / expect).abs();
            assert!(rel < 1e-11, "t={t} df={df}: got {got}, want {expect}");
        }
    }

    #[test]
    fn log_tail_finite_at_paper_scale_magnitudes() {
        for t in [10.0, 20.0, 30.0, 40.0, 50.0] {
            let lp = ln_student_t_upper_tail(t, 1e5).unwrap();
            assert!(lp.is_finite() && lp < 0.0, "t={t}: ln p = {lp}");
        }
        // monotone decreasing in t
        let a = ln_student_t_upper_tail(49.0, 1e5).unwrap();
        let b = ln_student_t_upper_tail(50.0, 1e5).unwrap();
        assert!(b < a);
    }

    #[test]
    fn welch_matches_exact_rational_fixture() {
        // a = {2.1, 2.5, 2.3, 2.7}, b = {1.9, 2.0, 2.1}:
        // s_a² = 0.2/3, s_b² = 0.01, so t = 0.4/√0.02 = 2√2 and
        // df = (1/50)² / (1/10800 + 1/180000) = 216/53, both exact.
        let a = sample(&[2.1, 2.5, 2.3, 2.7]);
        let b = sample(&[1.9, 2.0, 2.1]);
        let (t, df) = welch_t(&a, &b).unwrap();
        let t_exact = 2.0 * std::f64::consts::SQRT_2;
        let df_exact = 216.0 / 53.0;
        assert!(((t - t_exact) / t_exact).abs() < 1e-14, "t={t}");
        assert!(((df - df_exact) / df_exact).abs() < 1e-14, "df={df}");
        // quadrature reference for this (t, df)
        let p = student_t_upper_tail(t, df).unwrap();
        assert!(((p - 0.023203604963238571) / p).abs() < 1e-12);
    }

    #[test]
    fn welch_zero_t_for_identical_samples_and_antisymmetry() {
        let a = sample(&[0.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
        let (t, _) = welch_t(&a, &a.clone()).unwrap();
        assert_eq!(t, 0.0);

        let b = sample(&[0.3, 0.9, 0.4, 1.2]);
        let (t_ab, df_ab) = welch_t(&a, &b).unwrap();
        let (t_ba, df_ba) = welch_t(&b, &a).unwrap();
        assert_eq!(t_ab, -t_ba);
        assert_eq!(df_ab, df_ba);
    }

    #[test]
    fn welch_error_paths() {
        let short = sample(&[1.0]);
        let ok = sample(&[1.0, 2.0, 3.0]);
        assert_eq!(
            welch_t(&short, &ok).unwrap_err(),
            StatsError::TooFewObservations("test".into())
        );
        let nan = sample(&[1.0, f64::NAN]);
        assert!(matches!(
            welch_t(&nan, &ok).unwrap_err(),
            StatsError::NonFiniteValue(_)
        ));
        let flat = sample(&[2.0, 2.0, 2.0]);
        assert_eq!(
            welch_t(&flat, &flat.clone()).unwrap_err(),
            StatsError::DegenerateSamples
        );
        // one flat sample is fine
        assert!(welch_t(&flat, &ok).is_ok());
    }

    #[test]
    fn one_sided_test_fixture() {
        // h = {1,1,1,0}, l = {0,0,0,1}: t = √2, df = 6 exactly, and
        // P(T_6 > √2) = 53/512 ≈ 0.1035 — above 0.05, so not rejected.
        let h = sample(&[1.0, 1.0, 1.0, 0.0]);
        let l = sample(&[0.0, 0.0, 0.0, 1.0]);
        let r = one_sided_test(&h, &l, 0.05).unwrap();
        assert!(((r.t_statistic - std::f64::consts::SQRT_2) / r.t_statistic).abs() < 1e-14);
        assert!((r.degrees_of_freedom - 6.0).abs() < 1e-12);
        assert!(((r.p_value - 53.0 / 512.0) / r.p_value).abs() < 1e-12);
        assert!(!r.rejected);
        assert_eq!((r.n1, r.n2), (4, 4));
        // the same data is significant at alpha = 0.15
        assert!(one_sided_test(&h, &l, 0.15).unwrap().rejected);
    }

    #[test]
    fn one_sided_test_identical_samples_gives_half() {
        let a = sample(&[1.0, 2.0, 3.0, 4.0]);
        let r = one_sided_test(&a, &a.clone(), 0.05).unwrap();
        assert_eq!(r.p_value, 0.5);
        assert!(!r.rejected);
    }

    #[test]
    fn one_sided_p_values_are_complementary() {
        let h = sample(&[3.1, 2.9, 3.4, 2.8, 3.3]);
        let l = sample(&[2.5, 2.9, 2.4, 2.85]);
        let fwd = one_sided_test(&h, &l, 0.05).unwrap();
        let rev = one_sided_test(&l, &h, 0.05).unwrap();
        assert!((fwd.p_value + rev.p_value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn one_sided_test_rejects_bad_alpha() {
        let a = sample(&[1.0, 2.0, 3.0]);
        let b = sample(&[0.0, 1.0, 2.0]);
        assert!(one_sided_test(&a, &b, 0.0).is_err());
        assert!(one_sided_test(&a, &b, 1.0).is_err());
    }

    #[test]
    fn rejected_iff_p_below_alpha() {
        let h = sample(&[5.0, 6.0, 7.0, 8.0]);
        let l = sample(&[1.0, 2.0, 1.5, 2.5]);
        let r = one_sided_test(&h, &l, 0.01).unwrap();
        assert_eq!(r.rejected, r.p_value < r.alpha);
        assert!(r.rejected);
        assert!((r.log10_p_value - r.p_value.log10()).abs() < 1e-9);
    }
}
