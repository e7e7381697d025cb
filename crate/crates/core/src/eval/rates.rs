use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Proportion with a 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub value: f64,
    pub low: f64,
    pub high: f64,
    pub successes: usize,
    pub trials: usize,
}

/// 95% Wilson score interval for `k` successes in `n` trials; `(0, 1)` when
/// `n = 0`.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let (nf, ph) = (n as f64, k as f64 / n as f64);
    let denom = 1.0 + z * z / nf;
    let center = (ph + z * z / (2.0 * nf)) / denom;
    let half = z * (ph * (1.0 - ph) / nf + z * z / (4.0 * nf * nf)).sqrt() / denom;
    let low = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if k == n { 1.0 } else { (center + half).min(1.0) };
    (low, high)
}

impl RateEstimate {
    fn new(successes: usize, trials: usize) -> Self {
        let (low, high) = wilson_interval(successes, trials);
        let value = if trials == 0 { f64::NAN } else { successes as f64 / trials as f64 };
        Self { value, low, high, successes, trials }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    /// False positives over negatives.
    pub fpr: RateEstimate,
    /// False negatives over positives.
    pub fnr: RateEstimate,
}

pub fn empirical_rates(verdicts: &[bool], labels: &[bool]) -> Result<Rates> {
    if verdicts.len() != labels.len() {
        return invalid("verdicts and labels differ in length");
    }
    let fp = verdicts.iter().zip(labels).filter(|(v, l)| **v && !**l).count();
    let fn_ = verdicts.iter().zip(labels).filter(|(v, l)| !**v && **l).count();
    let pos = labels.iter().filter(|l| **l).count();
    Ok(Rates {
        fpr: RateEstimate::new(fp, labels.len() - pos),
        fnr: RateEstimate::new(fn_, pos),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_detectors() {
        let labels: Vec<bool> = (0..200).map(|i| i % 29 == 0).collect();
        let none = empirical_rates(&vec![false; 200], &labels).unwrap();
        assert_eq!((none.fpr.value, none.fnr.value), (0.0, 1.0));
        let all = empirical_rates(&vec![true; 200], &labels).unwrap();
        assert_eq!((all.fpr.value, all.fnr.value), (1.0, 0.0));
    }

    #[test]
    fn wilson_reference_values() {
        // 10 of 100: (0.0552, 0.1744) to four decimals.
        let (lo, hi) = wilson_interval(10, 100);
        assert!((lo - 0.0552).abs() < 1e-4 && (hi - 0.1744).abs() < 1e-4, "{lo} {hi}");
        let (lo, hi) = wilson_interval(0, 50);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.08);
    }

    #[test]
    fn length_mismatch() {
        assert!(empirical_rates(&[true], &[true, false]).is_err());
    }
}
