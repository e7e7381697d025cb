use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleMode {
    /// Positive only when every member is.
    AllOf,
    /// Positive when any member is.
    AnyOf,
}

pub fn ensemble(verdicts: &[bool], mode: EnsembleMode) -> bool {
    match mode {
        EnsembleMode::AllOf => verdicts.iter().all(|v| *v),
        EnsembleMode::AnyOf => verdicts.iter().any(|v| *v),
    }
}

/// Combines per-cycle member verdict columns. All columns must have the
/// same length.
pub fn ensemble_log(members: &[&[bool]], mode: EnsembleMode) -> Vec<bool> {
    let n = members.first().map_or(0, |m| m.len());
    assert!(members.iter().all(|m| m.len() == n), "member logs differ in length");
    (0..n)
        .map(|i| {
            let row: Vec<bool> = members.iter().map(|m| m[i]).collect();
            ensemble(&row, mode)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert!(!ensemble(&[true, false, true], EnsembleMode::AllOf));
        assert!(ensemble(&[false, true], EnsembleMode::AnyOf));
        assert!(ensemble(&[true, true], EnsembleMode::AllOf));
        assert!(!ensemble(&[false, false], EnsembleMode::AnyOf));
    }

    proptest! {
        #[test]
        fn containment(a in proptest::collection::vec(any::<bool>(), 50), b in proptest::collection::vec(any::<bool>(), 50)) {
            let and = ensemble_log(&[&a, &b], EnsembleMode::AllOf);
            let or = ensemble_log(&[&a, &b], EnsembleMode::AnyOf);
            for i in 0..50 {
                prop_assert!(!and[i] || (a[i] && b[i]));
                prop_assert!(or[i] || (!a[i] && !b[i]));
            }
        }
    }
}
