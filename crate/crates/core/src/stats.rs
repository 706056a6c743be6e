//! Statistical test helpers used by the security experiments and the
//! distribution-level test suites.
//!
//! Two tools are provided: a two-sample Kolmogorov–Smirnov test with the
//! classical asymptotic p-value, and a chi-square goodness-of-fit test whose
//! p-value comes from the chi-square survival function. Both are plain
//! functions returning value structs so experiment reports can print them.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

/// Errors from malformed test inputs.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    /// A sample set was empty.
    #[error("empty sample for {context}")]
    EmptySample { context: &'static str },
    /// Observed and expected bin counts disagree in length.
    #[error("bin mismatch: {observed} observed vs {expected} expected")]
    BinMismatch { observed: usize, expected: usize },
}

/// Result of a two-sample Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsTest {
    /// Supremum distance between the two empirical CDFs.
    pub statistic: f64,
    /// Asymptotic p-value for the hypothesis that both samples share a
    /// distribution.
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
}

/// Two-sample Kolmogorov–Smirnov test.
///
/// Sorts copies of both samples, walks the pooled order to find the largest
/// gap between the empirical CDFs, and converts it to a p-value through the
/// asymptotic Kolmogorov distribution with the usual small-sample correction.
pub fn ks_two_sample(sample1: &[f64], sample2: &[f64]) -> Result<KsTest, StatsError> {
    if sample1.is_empty() || sample2.is_empty() {
        return Err(StatsError::EmptySample {
            context: "ks_two_sample",
        });
    }
    let mut a = sample1.to_vec();
    let mut b = sample2.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).expect("no NaN in KS input"));
    b.sort_by(|x, y| x.partial_cmp(y).expect("no NaN in KS input"));

    let (n1, n2) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n1 && j < n2 {
        let x = a[i].min(b[j]);
        while i < n1 && a[i] <= x {
            i += 1;
        }
        while j < n2 && b[j] <= x {
            j += 1;
        }
        let diff = (i as f64 / n1 as f64 - j as f64 / n2 as f64).abs();
        if diff > d {
            d = diff;
        }
    }

    let n_eff = (n1 as f64 * n2 as f64) / (n1 as f64 + n2 as f64);
    let sqrt_ne = n_eff.sqrt();
    let lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
    Ok(KsTest {
        statistic: d,
        p_value: kolmogorov_sf(lambda),
        n1,
        n2,
    })
}

/// Survival function of the Kolmogorov distribution,
/// `Q(lambda) = 2 * sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2)`.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0f64;
    let mut sign = 1.0f64;
    for j in 1..=100 {
        let term = (-2.0 * (j as f64) * (j as f64) * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Result of a chi-square goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    /// Degrees of freedom (bins - 1).
    pub dof: usize,
    pub p_value: f64,
}

/// Chi-square goodness of fit of observed bin counts against expected counts.
///
/// `expected` carries absolute counts (probabilities times sample size);
/// callers are responsible for binning so that expected counts are not tiny.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> Result<ChiSquareTest, StatsError> {
    if observed.is_empty() {
        return Err(StatsError::EmptySample {
            context: "chi_square_gof",
        });
    }
    if observed.len() != expected.len() {
        return Err(StatsError::BinMismatch {
            observed: observed.len(),
            expected: expected.len(),
        });
    }
    let mut stat = 0.0f64;
    for (&o, &e) in observed.iter().zip(expected) {
        debug_assert!(e > 0.0, "expected count must be positive");
        let diff = o as f64 - e;
        stat += diff * diff / e;
    }
    let dof = observed.len() - 1;
    let p_value = if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).expect("dof > 0");
        1.0 - dist.cdf(stat)
    };
    Ok(ChiSquareTest {
        statistic: stat,
        dof,
        p_value,
    })
}

/// Chi-square uniformity test of residues in `[0, q)`, using `bins`
/// near-equal-width bins with exact per-bin probabilities.
pub fn chi_square_uniform(values: &[u64], q: u64, bins: usize) -> Result<ChiSquareTest, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptySample {
            context: "chi_square_uniform",
        });
    }
    let bins = bins.min(q as usize).max(1);
    let width = q.div_ceil(bins as u64);
    // Rounding the width up can leave the tail of the requested bin count
    // past q; only ceil(q / width) bins actually receive mass.
    let bins = q.div_ceil(width) as usize;
    let mut observed = vec![0u64; bins];
    for &v in values {
        debug_assert!(v < q);
        observed[(v / width) as usize] += 1;
    }
    let n = values.len() as f64;
    let expected: Vec<f64> = (0..bins as u64)
        .map(|b| {
            let lo = b * width;
            let hi = ((b + 1) * width).min(q);
            n * ((hi - lo) as f64 / q as f64)
        })
        .collect();
    chi_square_gof(&observed, &expected)
}

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}
