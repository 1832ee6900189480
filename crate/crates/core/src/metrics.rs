//! Per-trial error proportions and their aggregates.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSummary {
    pub n: usize,
    /// Rejections.
    pub r: usize,
    /// False discoveries.
    pub v: usize,
    /// Acceptances, `n - r`.
    pub a: usize,
    /// False non-discoveries.
    pub t: usize,
    pub fdp: f64,
    pub fnp: f64,
}

/// Counts a decision vector against the true labels (`true` = non-null).
pub fn summarize(reject: &[bool], theta: &[bool]) -> Result<TrialSummary> {
    if reject.len() != theta.len() {
        return Err(Error::LengthMismatch {
            left: reject.len(),
            right: theta.len(),
        });
    }
    let n = reject.len();
    let (mut r, mut v, mut t) = (0, 0, 0);
    for (rej, alt) in reject.iter().zip(theta) {
        match (*rej, *alt) {
            (true, false) => {
                r += 1;
                v += 1;
            }
            (true, true) => r += 1,
            (false, true) => t += 1,
            (false, false) => {}
        }
    }
    let a = n - r;
    Ok(TrialSummary {
        n,
        r,
        v,
        a,
        t,
        fdp: v as f64 / r.max(1) as f64,
        fnp: t as f64 / a.max(1) as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Fdp,
    Fnp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateReport {
    pub trials: usize,
    pub fdr: f64,
    pub fdr_se: f64,
    pub fnr: f64,
    pub fnr_se: f64,
    pub mfdr: f64,
    pub mfnr: f64,
}

fn mean_se(values: impl Iterator<Item = f64> + Clone, k: usize) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / k as f64;
    if k < 2 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1) as f64;
    (mean, (var / k as f64).sqrt())
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// FDR/FNR as means over trials (in the given order), mFDR/mFNR as ratios of sums.
pub fn aggregate(summaries: &[TrialSummary]) -> Result<AggregateReport> {
    if summaries.is_empty() {
        return Err(Error::Empty("trial summaries"));
    }
    let k = summaries.len();
    let (fdr, fdr_se) = mean_se(summaries.iter().map(|s| s.fdp), k);
    let (fnr, fnr_se) = mean_se(summaries.iter().map(|s| s.fnp), k);
    let sum = |f: fn(&TrialSummary) -> usize| summaries.iter().map(f).sum::<usize>();
    Ok(AggregateReport {
        trials: k,
        fdr,
        fdr_se,
        fnr,
        fnr_se,
        mfdr: ratio(sum(|s| s.v), sum(|s| s.r)),
        mfnr: ratio(sum(|s| s.t), sum(|s| s.a)),
    })
}

/// Fraction of trials whose FDP or FNP is strictly above `threshold`.
pub fn exceedance(summaries: &[TrialSummary], metric: Metric, threshold: f64) -> f64 {
    if summaries.is_empty() {
        return 0.0;
    }
    let count = summaries
        .iter()
        .filter(|s| {
            let m = match metric {
                Metric::Fdp => s.fdp,
                Metric::Fnp => s.fnp,
            };
            m > threshold
        })
        .count();
    count as f64 / summaries.len() as f64
}
