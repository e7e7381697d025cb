//! Wall-clock latency of one detection step.
//!
//! One invocation covers what the simulator does per agent and step: take
//! the M predicted costs in sample order, sort them into a
//! [`CostSampleSet`], compare the observed cost against the rank threshold
//! and record an event on detection. Inputs are generated before the timer
//! starts.

use std::hint::black_box;
use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::model::{AgentId, DetectionEvent};
use crate::qad::{detect_step, CostSampleSet};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatencyReport {
    pub m: usize,
    pub n: usize,
    pub invocations: usize,
    pub mean_seconds: f64,
    pub p99_seconds: f64,
    pub max_seconds: f64,
    pub detections: usize,
}

/// Times `invocations` detection steps at sample count `m` and offset `n`.
pub fn detection_latency(m: usize, n: usize, invocations: usize, seed: u64) -> Result<LatencyReport> {
    if m == 0 || n >= m || invocations == 0 {
        return invalid("latency run needs M > n ≥ 0 and at least one invocation");
    }
    let mut r = rng::stream(seed, &[]);
    let inputs: Vec<(Vec<f64>, f64)> = (0..invocations)
        .map(|_| {
            let s: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut r)).collect();
            let obs = if r.random_bool(0.05) { 3.0 } else { StandardNormal.sample(&mut r) };
            (s, obs)
        })
        .collect();

    let mut times = Vec::with_capacity(invocations);
    let mut events: Vec<DetectionEvent<f64>> = Vec::new();
    for (step, (samples, observed)) in inputs.into_iter().enumerate() {
        let t = Instant::now();
        let set = CostSampleSet::from_unsorted(step, black_box(samples))?;
        if detect_step(black_box(observed), &set, n)? {
            events.push(DetectionEvent {
                wall_step: step,
                agent_id: AgentId(0),
                observed_cost: observed,
                rank_threshold_cost: set.order_statistic(m - n),
                detector_name: "qad".to_string(),
            });
        }
        times.push(t.elapsed().as_secs_f64());
    }
    let total: f64 = times.iter().sum();
    times.sort_by(f64::total_cmp);
    let p99 = times[((invocations as f64 * 0.99).ceil() as usize).clamp(1, invocations) - 1];
    Ok(LatencyReport {
        m,
        n,
        invocations,
        mean_seconds: total / invocations as f64,
        p99_seconds: p99,
        max_seconds: *times.last().expect("nonempty"),
        detections: black_box(events).len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_is_consistent() {
        let r = detection_latency(100, 1, 2000, 4).unwrap();
        assert_eq!(r.invocations, 2000);
        assert!(r.mean_seconds > 0.0 && r.mean_seconds <= r.max_seconds);
        assert!(r.p99_seconds <= r.max_seconds);
        assert!(r.detections >= 50, "planted outliers should fire: {}", r.detections);
    }

    #[test]
    fn rejects_bad_offsets() {
        assert!(detection_latency(10, 10, 5, 0).is_err());
        assert!(detection_latency(10, 1, 0, 0).is_err());
    }
}
