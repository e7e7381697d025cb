//! Cost-degradation tests against reference predicted-cost signals.
//!
//! The reference is an `M × T` matrix of predicted costs (one row per
//! prediction sample) and the observation a length-`T` cost signal. UDT
//! compares the horizon sum of the observation with the empirical
//! `1 − p` quantile of the reference sums. PDT repeats the test on every
//! suffix window `[τ, T]` at level `p / T` and fires if any window does.
//! Reference rows are weighted uniformly.

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

fn check<S: Scalar>(reference: &[Vec<S>], observed: &[S]) -> Result<usize> {
    if reference.len() < 2 {
        return invalid("need at least two reference signals");
    }
    let t = observed.len();
    if t == 0 || reference.iter().any(|r| r.len() != t) {
        return invalid("reference signals and observation must share a nonzero length");
    }
    Ok(t)
}

/// Number of reference window sums strictly below the observed one, for the
/// window starting at 0-based index `from`.
fn window_count<S: Scalar>(reference: &[Vec<S>], observed: &[S], from: usize) -> usize {
    let sum = |v: &[S]| v[from..].iter().fold(S::zero(), |a, b| a + *b);
    let obs = sum(observed);
    reference.iter().filter(|r| sum(r) < obs).count()
}

/// Count a window needs to exceed the empirical `1 − level` quantile:
/// `⌈(1 − level)·M⌉`, at least 1.
pub fn window_threshold_count(m: usize, level: f64) -> usize {
    (((1.0 - level) * m as f64).ceil() as usize).clamp(1, m)
}

/// Fraction of reference horizon sums strictly below the observed sum.
pub fn udt_score<S: Scalar>(reference: &[Vec<S>], observed: &[S]) -> Result<f64> {
    check(reference, observed)?;
    Ok(window_count(reference, observed, 0) as f64 / reference.len() as f64)
}

/// True iff the observed horizon sum exceeds the empirical `1 − p_value`
/// quantile of the reference sums. With all-equal references the threshold
/// is that constant.
pub fn udt_detect<S: Scalar>(reference: &[Vec<S>], observed: &[S], p_value: f64) -> Result<bool> {
    check(reference, observed)?;
    if !(p_value > 0.0 && p_value < 1.0) {
        return invalid("p-value must lie in (0, 1)");
    }
    let m = reference.len();
    Ok(window_count(reference, observed, 0) >= window_threshold_count(m, p_value))
}

/// Largest per-window fraction of reference sums strictly below the
/// observation, over all suffix windows.
pub fn pdt_score<S: Scalar>(reference: &[Vec<S>], observed: &[S]) -> Result<f64> {
    let t = check(reference, observed)?;
    let best = (0..t).map(|k| window_count(reference, observed, k)).max().unwrap_or(0);
    Ok(best as f64 / reference.len() as f64)
}

/// UDT on every suffix window at the Bonferroni level `p_value / T`.
pub fn pdt_detect<S: Scalar>(reference: &[Vec<S>], observed: &[S], p_value: f64) -> Result<bool> {
    let t = check(reference, observed)?;
    if !(p_value > 0.0 && p_value < 1.0) {
        return invalid("p-value must lie in (0, 1)");
    }
    let need = window_threshold_count(reference.len(), p_value / t as f64);
    Ok((0..t).any(|k| window_count(reference, observed, k) >= need))
}
