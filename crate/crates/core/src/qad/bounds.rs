use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Which error rate calibration guarantees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationTarget {
    /// Largest n with FPR bound ≤ α.
    BoundFpr,
    /// Smallest n with FNR bound ≤ α.
    BoundFnr,
}

impl CalibrationTarget {
    fn name(self) -> &'static str {
        match self {
            CalibrationTarget::BoundFpr => "fpr_bound",
            CalibrationTarget::BoundFnr => "fnr_bound",
        }
    }
}

fn check(m: usize, p: f64) -> Result<()> {
    if m == 0 {
        return invalid("M must be at least 1");
    }
    if !(p > 0.0 && p < 1.0) {
        return invalid(format!("p = {p} must lie in (0, 1)"));
    }
    Ok(())
}

/// Log of every `Bin(M, p)` mass via the term-ratio recurrence.
fn log_pmf(m: usize, p: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(m + 1);
    let log_odds = p.ln() - (-p).ln_1p();
    let mut lt = m as f64 * (-p).ln_1p();
    out.push(lt);
    for i in 0..m {
        lt += ((m - i) as f64).ln() - ((i + 1) as f64).ln() + log_odds;
        out.push(lt);
    }
    out
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `(P[Bin(M,p) ≤ n], P[Bin(M,p) ≥ n + 1])` for every n in `0..M`.
///
/// Both tails are accumulated independently in log space and normalized by
/// their sum, so each keeps relative precision and together they add to one.
pub fn binomial_tails(m: usize, p: f64) -> Result<Vec<(f64, f64)>> {
    check(m, p)?;
    let lp = log_pmf(m, p);
    let mut lower = vec![f64::NEG_INFINITY; m + 1];
    let mut acc = f64::NEG_INFINITY;
    for (i, l) in lp.iter().enumerate() {
        acc = log_add(acc, *l);
        lower[i] = acc;
    }
    let mut upper = vec![f64::NEG_INFINITY; m + 2];
    let mut acc = f64::NEG_INFINITY;
    for i in (0..=m).rev() {
        acc = log_add(acc, lp[i]);
        upper[i] = acc;
    }
    Ok((0..m)
        .map(|n| {
            let (lo, up) = (lower[n], upper[n + 1]);
            let total = log_add(lo, up);
            ((lo - total).exp(), (up - total).exp())
        })
        .collect())
}

fn tails_at(m: usize, n: usize, p: f64) -> Result<(f64, f64)> {
    check(m, p)?;
    if n >= m {
        return invalid(format!("n = {n} must be below M = {m}"));
    }
    Ok(binomial_tails(m, p)?[n])
}

/// Upper bound on the false-positive rate: `Σ_{i=0}^{n} C(M,i) pⁱ (1−p)^{M−i}`.
pub fn fpr_bound(m: usize, n: usize, p: f64) -> Result<f64> {
    tails_at(m, n, p).map(|t| t.0)
}

/// Upper bound on the false-negative rate: `Σ_{i=n+1}^{M} C(M,i) pⁱ (1−p)^{M−i}`.
pub fn fnr_bound(m: usize, n: usize, p: f64) -> Result<f64> {
    tails_at(m, n, p).map(|t| t.1)
}

/// Picks the rank offset `n` from the bounds alone.
pub fn calibrate(m: usize, p: f64, target: CalibrationTarget, alpha: f64) -> Result<usize> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha = {alpha} must lie in (0, 1)"));
    }
    let tails = binomial_tails(m, p)?;
    let found = match target {
        CalibrationTarget::BoundFpr => tails.iter().rposition(|t| t.0 <= alpha),
        CalibrationTarget::BoundFnr => tails.iter().position(|t| t.1 <= alpha),
    };
    found.ok_or_else(|| {
        let (best_n, best_bound) = match target {
            CalibrationTarget::BoundFpr => (0, tails[0].0),
            CalibrationTarget::BoundFnr => (m - 1, tails[m - 1].1),
        };
        Error::InfeasibleCalibration {
            target: target.name(),
            alpha,
            best_bound,
            best_n,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};
    use proptest::prelude::*;

    /// Exact rational binomial CDF; independent of the log-space recurrence.
    fn exact_cdf(m: usize, n: usize, p_num: i64, p_den: i64) -> f64 {
        let p = BigRational::new(BigInt::from(p_num), BigInt::from(p_den));
        let q = BigRational::one() - p.clone();
        let mut sum = BigRational::zero();
        let mut binom = BigInt::one();
        for i in 0..=n {
            if i > 0 {
                binom = binom * BigInt::from(m - i + 1) / BigInt::from(i);
            }
            let term = BigRational::from_integer(binom.clone()) * pow(&p, i) * pow(&q, m - i);
            sum += term;
        }
        sum.to_f64().unwrap()
    }

    fn pow(x: &BigRational, k: usize) -> BigRational {
        (0..k).fold(BigRational::one(), |acc, _| acc * x.clone())
    }

    #[test]
    fn reference_values_match_exact_rationals() {
        // Frozen values computed by the rational oracle above.
        let fpr = exact_cdf(100, 1, 1, 20);
        assert!((fpr - 0.037081).abs() < 1e-6, "{fpr}");
        assert!((fpr_bound(100, 1, 0.05).unwrap() - fpr).abs() < 1e-13);
        let fnr = 1.0 - exact_cdf(100, 9, 1, 20);
        assert!((fnr - 0.028188).abs() < 1e-6, "{fnr}");
        assert!((fnr_bound(100, 9, 0.05).unwrap() - fnr).abs() < 1e-13);
    }

    #[test]
    fn edge_examples() {
        assert!((fpr_bound(1, 0, 0.3).unwrap() - 0.7).abs() < 1e-15);
        for &(m, p) in &[(5usize, 0.3f64), (20, 0.05), (3, 0.9)] {
            let pm = p.powi(m as i32);
            assert!((fpr_bound(m, m - 1, p).unwrap() - (1.0 - pm)).abs() < 1e-14);
            assert!((fnr_bound(m, m - 1, p).unwrap() - pm).abs() < 1e-14 * pm.max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn tiny_tail_keeps_relative_precision() {
        let got = fnr_bound(50, 49, 0.01).unwrap();
        let want = 0.01f64.powi(50);
        assert!(((got - want) / want).abs() < 1e-10, "{got:e} vs {want:e}");
    }

    #[test]
    fn large_m_does_not_overflow() {
        let t = binomial_tails(5000, 0.05).unwrap();
        assert!(t.iter().all(|(a, b)| a.is_finite() && b.is_finite()));
        assert!((t[249].0 + t[249].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn calibration_examples() {
        assert_eq!(calibrate(100, 0.05, CalibrationTarget::BoundFpr, 0.05).unwrap(), 1);
        assert_eq!(calibrate(100, 0.05, CalibrationTarget::BoundFnr, 0.05).unwrap(), 9);
        match calibrate(1, 0.5, CalibrationTarget::BoundFpr, 0.4) {
            Err(Error::InfeasibleCalibration { best_bound, best_n, .. }) => {
                assert_eq!(best_n, 0);
                assert!((best_bound - 0.5).abs() < 1e-15);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
        assert!(calibrate(10, 0.5, CalibrationTarget::BoundFnr, 1.0).is_err());
    }

    #[test]
    fn invalid_inputs() {
        assert!(fpr_bound(0, 0, 0.5).is_err());
        assert!(fpr_bound(10, 10, 0.5).is_err());
        assert!(fpr_bound(10, 1, 0.0).is_err());
        assert!(fnr_bound(10, 1, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn matches_rational_oracle(m in 1usize..60, den in 2i64..40, frac in 0.0f64..1.0) {
            let num = 1 + ((den - 2) as f64 * frac) as i64;
            let n = ((m - 1) as f64 * frac) as usize;
            let p = num as f64 / den as f64;
            let want = exact_cdf(m, n, num, den);
            let got = fpr_bound(m, n, p).unwrap();
            prop_assert!((got - want).abs() < 1e-12, "{} vs {}", got, want);
        }

        #[test]
        fn monotone_in_n_and_p(m in 2usize..200, p in 0.01f64..0.9) {
            let t = binomial_tails(m, p).unwrap();
            for w in t.windows(2) {
                prop_assert!(w[1].0 >= w[0].0 - 1e-15);
                prop_assert!(w[1].1 <= w[0].1 + 1e-15);
            }
            let n = m / 3;
            let lo = fpr_bound(m, n, p).unwrap();
            let hi = fpr_bound(m, n, (p * 1.1).min(0.99)).unwrap();
            prop_assert!(hi <= lo + 1e-15);
        }
    }
}
