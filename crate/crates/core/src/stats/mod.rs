//! Summary statistics, Student t-tests and run reports.

mod report;

pub use report::{
    build_report, emit_report, read_report_json, render_text, AggregateRow, Manifest, PairedRow,
    Report, ReportFormat, ScoreRow,
};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation, n - 1 denominator; 0 for a single sample.
    pub sd: f64,
    pub se: f64,
}

pub fn summarize(samples: &[f64]) -> Result<SummaryStats> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("samples"));
    }
    let n = samples.len();
    if samples.iter().all(|&x| x == samples[0]) {
        return Ok(SummaryStats {
            n,
            mean: samples[0],
            sd: 0.0,
            se: 0.0,
        });
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let sd = {
        let ss: f64 = samples.iter().map(|x| (x - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    };
    Ok(SummaryStats {
        n,
        mean,
        sd,
        se: sd / (n as f64).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    pub df: usize,
    pub p_two_sided: f64,
    /// P(T >= t): evidence that the mean exceeds the reference.
    pub p_one_sided: f64,
    /// Two-sided p below 0.01.
    pub significant_1pct: bool,
    /// Two-sided p below 0.05.
    pub significant_5pct: bool,
}

impl TTestResult {
    fn from_t(t: f64, df: usize) -> Result<Self> {
        let dist = StudentsT::new(0.0, 1.0, df as f64)
            .map_err(|e| Error::InvalidParam(format!("t distribution: {e}")))?;
        let upper = dist.sf(t).clamp(0.0, 1.0);
        let p_two = (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0);
        Ok(TTestResult {
            t,
            df,
            p_two_sided: p_two,
            p_one_sided: upper,
            significant_1pct: p_two < 0.01,
            significant_5pct: p_two < 0.05,
        })
    }
}

/// Student t-test of the sample mean against `mu0`.
pub fn one_sample_t(samples: &[f64], mu0: f64) -> Result<TTestResult> {
    if samples.len() < 2 {
        return Err(Error::Degenerate(format!(
            "t-test needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    if !mu0.is_finite() {
        return Err(Error::NonFinite("mu0"));
    }
    let s = summarize(samples)?;
    if s.sd == 0.0 {
        // identical samples at the reference carry no evidence either way
        if s.mean == mu0 {
            return TTestResult::from_t(0.0, s.n - 1);
        }
        return Err(Error::Degenerate("zero variance".into()));
    }
    TTestResult::from_t((s.mean - mu0) / s.se, s.n - 1)
}

/// One-sample t-test of the differences `a - b` against 0.
pub fn paired_t(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    one_sample_t(&diff, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use statrs::function::gamma::ln_gamma;

    /// CDF of Student's t by Simpson integration of the density.
    fn t_cdf_oracle(t: f64, df: f64) -> f64 {
        let ln_norm = ln_gamma((df + 1.0) / 2.0)
            - ln_gamma(df / 2.0)
            - 0.5 * (df * std::f64::consts::PI).ln();
        let pdf = |x: f64| (ln_norm - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp();
        let steps = 20_000;
        let h = t.abs() / steps as f64;
        let mut acc = pdf(0.0) + pdf(t.abs());
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * pdf(i as f64 * h);
        }
        let half = acc * h / 3.0;
        if t >= 0.0 {
            0.5 + half
        } else {
            0.5 - half
        }
    }

    #[test]
    fn summaries() {
        let s = summarize(&[3.5]).unwrap();
        assert_eq!((s.n, s.mean, s.sd, s.se), (1, 3.5, 0.0, 0.0));
        let s = summarize(&[0.0, 1.0]).unwrap();
        assert_eq!(s.mean, 0.5);
        assert_abs_diff_eq!(s.sd, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.se, 0.5, epsilon = 1e-15);
        assert_eq!(summarize(&[0.2, 0.2, 0.2]).unwrap().sd, 0.0);
        assert!(summarize(&[]).is_err());
        assert!(summarize(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn symmetric_sample_gives_zero_t() {
        let r = one_sample_t(&[0.1, 0.3, 0.2, 0.4, 0.0], 0.2).unwrap();
        assert_abs_diff_eq!(r.t, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.p_two_sided, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.p_one_sided, 0.5, epsilon = 1e-12);
        assert_eq!(r.df, 4);
    }

    #[test]
    fn tight_sample_far_above() {
        let r = one_sample_t(&[0.9, 0.91, 0.89, 0.9], 0.25).unwrap();
        assert!(r.p_two_sided < 0.01 && r.significant_1pct);
        assert!(r.p_one_sided < r.p_two_sided);
    }

    #[test]
    fn hand_computed_t() {
        // mean 2, sd 1, n 4: t = (2 - 1) / 0.5
        let r = one_sample_t(&[1.0, 2.0, 3.0, 2.0], 1.0).unwrap();
        let sd = (2.0f64 / 3.0).sqrt();
        assert_abs_diff_eq!(r.t, 1.0 / (sd / 2.0), epsilon = 1e-12);
    }

    #[test]
    fn reported_single_word_score_is_significant() {
        // n 48, mean 0.372, sd 0.126 against 0.25
        let t = (0.372 - 0.25) / (0.126 / 48f64.sqrt());
        let r = TTestResult::from_t(t, 47).unwrap();
        assert!(r.significant_1pct, "{r:?}");
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            one_sample_t(&[0.5], 0.0),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            one_sample_t(&[0.5, 0.5], 0.0),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            paired_t(&[1.0, 2.0], &[0.0, 1.0]),
            Err(Error::Degenerate(_))
        ));
        assert!(paired_t(&[1.0, 2.0], &[0.0]).is_err());
    }

    #[test]
    fn paired_equal_is_zero() {
        let a = [0.1, 0.5, 0.9];
        let b = [0.2, 0.4, 0.9];
        let r = paired_t(&a, &a).unwrap();
        assert_eq!((r.t, r.p_two_sided), (0.0, 1.0));
        let r = paired_t(&a, &b).unwrap();
        assert_abs_diff_eq!(r.t, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn p_values_match_integrated_cdf() {
        for df in [10usize, 37, 47, 49] {
            for t in [-4.2, -2.0, -0.7, 0.0, 0.3, 1.5, 2.7, 3.5267, 6.0] {
                let r = TTestResult::from_t(t, df).unwrap();
                let cdf = t_cdf_oracle(t, df as f64);
                assert_abs_diff_eq!(r.p_one_sided, 1.0 - cdf, epsilon = 1e-6);
                let two = 2.0 * (1.0 - t_cdf_oracle(f64::abs(t), df as f64));
                assert_abs_diff_eq!(r.p_two_sided, two, epsilon = 1e-6);
            }
        }
    }
}
