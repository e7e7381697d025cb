//! Comparison detectors: prediction likelihood, cost-degradation tests
//! (UDT and PDT), time-to-collision, sampled adversarial reachability, and
//! boolean ensembles.
//!
//! Every detector exposes a scalar score oriented so that larger means more
//! anomalous, plus a thresholded verdict, so the evaluation code can sweep
//! thresholds uniformly.

mod degradation;
mod ensemble;
mod likelihood;
mod reach;

pub use degradation::{pdt_detect, pdt_score, udt_detect, udt_score, window_threshold_count};
pub use ensemble::{ensemble, ensemble_log, EnsembleMode};
pub use likelihood::{likelihood_detect, likelihood_score, LIKELIHOOD_GATE_RADIUS};
pub use reach::{adversarial_reach_detect, reach_min_gap, ReachConfig};

use crate::model::AgentState;
use crate::scalar::Scalar;
use crate::cost::time_to_collision;

/// Minimum time to collision between the ego and any agent; `∞` with no
/// agents.
pub fn min_ttc<S: Scalar>(ego: &AgentState<S>, agents: &[AgentState<S>]) -> S {
    let re = ego.agent_class.radius::<S>();
    agents
        .iter()
        .map(|a| time_to_collision(ego, a, (re, a.agent_class.radius())))
        .fold(S::infinity(), S::min)
}

/// Fires when the minimum time to collision drops below `threshold` seconds.
pub fn ttc_detect<S: Scalar>(ego: &AgentState<S>, agents: &[AgentState<S>], threshold: S) -> bool {
    min_ttc(ego, agents) < threshold
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AgentClass, Vec2};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn veh(x: f64, y: f64, h: f64, v: f64) -> AgentState<f64> {
        AgentState::new(Vec2::new(x, y), h, v, AgentClass::Vehicle)
    }

    #[test]
    fn ttc_examples() {
        let ego = veh(0.0, 0.0, 0.0, 2.5);
        // Closing at 5 m/s from 10 m with 2 m of combined radius: 1.6 s.
        let oncoming = veh(10.0, 0.0, PI, 2.5);
        assert!(!ttc_detect(&ego, &[oncoming], 1.0));
        assert!(ttc_detect(&ego, &[oncoming], 2.0));
        let near = veh(4.5, 0.0, PI, 2.5);
        assert!((min_ttc(&ego, &[near]) - 0.5).abs() < 1e-12);
        assert!(ttc_detect(&ego, &[near], 1.0));
        assert!(!ttc_detect(&ego, &[], 100.0));
    }

    proptest! {
        #[test]
        fn ttc_monotone_in_threshold(x in -30.0..30.0f64, y in -30.0..30.0f64, h in -3.0..3.0f64, v in 0.0..15.0f64, t1 in 0.0..5.0f64, dt in 0.0..5.0f64) {
            let ego = veh(0.0, 0.0, 0.0, 8.0);
            let a = [veh(x, y, h, v)];
            if ttc_detect(&ego, &a, t1) {
                prop_assert!(ttc_detect(&ego, &a, t1 + dt));
            }
        }
    }
}
