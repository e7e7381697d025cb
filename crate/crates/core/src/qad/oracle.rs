//! Large-sample ground truth for "is this cost in the top-p quantile".

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileOracleResult {
    /// Fraction of reference samples `≤ observed`.
    pub quantile: f64,
    /// Empirical `(1 − p)` quantile of the reference sample.
    pub threshold: f64,
    /// `observed ≥ threshold`.
    pub anomaly: bool,
}

/// Inverse empirical CDF at `q`: the `⌈q·N⌉`-th smallest value (at least
/// the first). Reorders `samples`.
pub fn empirical_quantile(samples: &mut [f64], q: f64) -> f64 {
    assert!(!samples.is_empty(), "empirical quantile of an empty sample");
    let n = samples.len();
    let k = ((q * n as f64).ceil() as usize).clamp(1, n);
    let (_, v, _) = samples.select_nth_unstable_by(k - 1, |a, b| a.total_cmp(b));
    *v
}

/// Oracle verdict against an already-drawn reference sample.
pub fn quantile_from_samples(observed: f64, samples: &mut [f64], p: f64) -> QuantileOracleResult {
    let below = samples.iter().filter(|c| **c <= observed).count();
    let threshold = empirical_quantile(samples, 1.0 - p);
    QuantileOracleResult {
        quantile: below as f64 / samples.len() as f64,
        threshold,
        anomaly: observed >= threshold,
    }
}

/// Draws `n_samples` costs from `sampler` and locates `observed` among them.
pub fn quantile_oracle(observed: f64, mut sampler: impl FnMut() -> f64, n_samples: usize, p: f64) -> QuantileOracleResult {
    let mut samples: Vec<f64> = (0..n_samples).map(|_| sampler()).collect();
    quantile_from_samples(observed, &mut samples, p)
}
