use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Score threshold: cycles with score `≥ threshold` are flagged.
    /// `+∞` for the empty-flag endpoint.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// Sorted by FPR (then TPR), from (0, 0) to (1, 1).
    pub points: Vec<RocPoint>,
    pub auroc: f64,
}

fn class_counts(labels: &[bool]) -> Result<(usize, usize)> {
    let pos = labels.iter().filter(|l| **l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::UndefinedMetric(format!("ROC needs both classes (got {pos} positive, {neg} negative)")));
    }
    Ok((pos, neg))
}

/// Threshold sweep over the distinct scores, larger scores flagged first;
/// AUROC by the trapezoid rule.
pub fn roc(scores: &[f64], labels: &[bool]) -> Result<RocCurve> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidArgument("scores and labels differ in length".into()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument("NaN score".into()));
    }
    let (pos, neg) = class_counts(labels)?;
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|a, b| scores[*b].total_cmp(&scores[*a]));
    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0, threshold: f64::INFINITY }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < idx.len() {
        let s = scores[idx[i]];
        while i < idx.len() && scores[idx[i]] == s {
            if labels[idx[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint { fpr: fp as f64 / neg as f64, tpr: tp as f64 / pos as f64, threshold: s });
    }
    let auroc = points.windows(2).map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0).sum();
    Ok(RocCurve { points, auroc })
}

/// Fraction of (positive, negative) pairs ranked correctly, ties counting
/// one half. Quadratic; meant as a reference.
pub fn auroc_pairwise(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, neg) = class_counts(labels)?;
    let mut acc = 0.0;
    for (sp, _) in scores.iter().zip(labels).filter(|(_, l)| **l) {
        for (sn, _) in scores.iter().zip(labels).filter(|(_, l)| !**l) {
            acc += if sp > sn {
                1.0
            } else if sp == sn {
                0.5
            } else {
                0.0
            };
        }
    }
    Ok(acc / (pos * neg) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestPoint {
    pub fpr: f64,
    pub fnr: f64,
    pub threshold: f64,
}

/// Curve point with the largest `TPR − FPR`, the one farthest above the
/// diagonal; ties go to the lower FPR.
pub fn best_point(curve: &RocCurve) -> BestPoint {
    let mut best = curve.points[0];
    for p in &curve.points[1..] {
        let (d, bd) = (p.tpr - p.fpr, best.tpr - best.fpr);
        if d > bd || (d == bd && p.fpr < best.fpr) {
            best = *p;
        }
    }
    BestPoint { fpr: best.fpr, fnr: 1.0 - best.tpr, threshold: best.threshold }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn perfect_scores() {
        let labels = [true, false, true, false, false];
        let scores: Vec<f64> = labels.iter().map(|l| if *l { 1.0 } else { 0.0 }).collect();
        let c = roc(&scores, &labels).unwrap();
        assert_eq!(c.auroc, 1.0);
        let b = best_point(&c);
        assert_eq!((b.fpr, b.fnr), (0.0, 0.0));
        let first = c.points.first().unwrap();
        let last = c.points.last().unwrap();
        assert_eq!((first.fpr, first.tpr, last.fpr, last.tpr), (0.0, 0.0, 1.0, 1.0));
    }

    #[test]
    fn independent_scores_are_near_chance() {
        let mut r = ChaCha8Rng::seed_from_u64(5);
        let labels: Vec<bool> = (0..10_000).map(|_| r.random_bool(0.3)).collect();
        let scores: Vec<f64> = (0..10_000).map(|_| r.random()).collect();
        let a = roc(&scores, &labels).unwrap().auroc;
        assert!((a - 0.5).abs() < 0.03, "{a}");
    }

    #[test]
    fn inverted_scores() {
        let mut r = ChaCha8Rng::seed_from_u64(6);
        let labels: Vec<bool> = (0..500).map(|_| r.random_bool(0.2)).collect();
        let scores: Vec<f64> = labels.iter().map(|l| r.random::<f64>() + if *l { 0.4 } else { 0.0 }).collect();
        let a = roc(&scores, &labels).unwrap().auroc;
        let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
        assert!((roc(&neg, &labels).unwrap().auroc - (1.0 - a)).abs() < 1e-12);
    }

    #[test]
    fn single_class_is_undefined() {
        assert!(matches!(roc(&[1.0, 2.0], &[true, true]), Err(Error::UndefinedMetric(_))));
        assert!(matches!(roc(&[1.0, 2.0], &[false, false]), Err(Error::UndefinedMetric(_))));
    }

    #[test]
    fn best_point_examples() {
        let diag = RocCurve {
            points: vec![
                RocPoint { fpr: 0.0, tpr: 0.0, threshold: f64::INFINITY },
                RocPoint { fpr: 0.5, tpr: 0.5, threshold: 1.0 },
                RocPoint { fpr: 1.0, tpr: 1.0, threshold: 0.0 },
            ],
            auroc: 0.5,
        };
        let b = best_point(&diag);
        assert_eq!((b.fpr, b.fnr), (0.0, 1.0));
        let three = RocCurve {
            points: vec![
                RocPoint { fpr: 0.0, tpr: 0.0, threshold: f64::INFINITY },
                RocPoint { fpr: 0.1, tpr: 0.9, threshold: 0.5 },
                RocPoint { fpr: 1.0, tpr: 1.0, threshold: 0.0 },
            ],
            auroc: 0.0,
        };
        let b = best_point(&three);
        assert!((b.fpr - 0.1).abs() < 1e-15 && (b.fnr - 0.1).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn trapezoid_matches_pairwise(raw in proptest::collection::vec((0u8..12, any::<bool>()), 2..300)) {
            let scores: Vec<f64> = raw.iter().map(|(s, _)| *s as f64).collect();
            let labels: Vec<bool> = raw.iter().map(|(_, l)| *l).collect();
            prop_assume!(labels.iter().any(|l| *l) && labels.iter().any(|l| !*l));
            let c = roc(&scores, &labels).unwrap();
            let pw = auroc_pairwise(&scores, &labels).unwrap();
            prop_assert!((c.auroc - pw).abs() <= 1e-9);
            prop_assert!(c.points.windows(2).all(|w| w[0].fpr <= w[1].fpr && w[0].tpr <= w[1].tpr));
            let b = best_point(&c);
            let on_curve = c.points.iter().any(|p| p.fpr == b.fpr && 1.0 - p.tpr == b.fnr);
            prop_assert!(on_curve);
            let best = c.points.iter().map(|p| p.tpr - p.fpr).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(((1.0 - b.fnr - b.fpr) - best).abs() <= 1e-12);
        }
    }
}
