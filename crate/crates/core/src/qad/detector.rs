use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{AgentId, DetectionEvent};
use crate::scalar::Scalar;

/// The M predicted costs at one future step, sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSampleSet<S> {
    pub step: usize,
    samples: Vec<S>,
}

impl<S: Scalar> CostSampleSet<S> {
    /// Sorts `samples`; rejects empty sets and NaN.
    pub fn from_unsorted(step: usize, mut samples: Vec<S>) -> Result<Self> {
        if samples.is_empty() {
            return invalid("cost sample set needs at least one sample");
        }
        if samples.iter().any(|c| c.is_nan()) {
            return invalid("cost samples must not be NaN");
        }
        samples.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        Ok(Self { step, samples })
    }

    pub fn from_sorted(step: usize, samples: Vec<S>) -> Result<Self> {
        if samples.is_empty() {
            return invalid("cost sample set needs at least one sample");
        }
        if samples.windows(2).any(|w| !(w[0] <= w[1])) {
            return invalid("cost samples are not sorted ascending");
        }
        Ok(Self { step, samples })
    }

    pub fn samples(&self) -> &[S] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// The `rank`-th smallest sample, 1-indexed.
    pub fn order_statistic(&self, rank: usize) -> S {
        self.samples[rank - 1]
    }
}

/// Number of samples `≤ observed`. The detector with offset `n` fires
/// exactly when this count is at least `M − n`.
#[inline]
pub fn rank_count<S: Scalar>(observed: S, set: &CostSampleSet<S>) -> usize {
    set.samples.partition_point(|c| *c <= observed)
}

/// `observed ≥ ĉ^{M−n}`, inclusive, duplicates counted by position.
#[inline]
pub fn detect_step<S: Scalar>(observed: S, set: &CostSampleSet<S>, n: usize) -> Result<bool> {
    let m = set.len();
    if n >= m {
        return invalid(format!("rank offset n = {n} must be below M = {m}"));
    }
    Ok(observed >= set.order_statistic(m - n))
}

/// One agent's predicted-cost sets for horizon steps τ = 1..T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentCostStream<S> {
    pub agent_id: AgentId,
    pub sets: Vec<CostSampleSet<S>>,
}

/// Runs the detector over one planning cycle.
///
/// `observed[a][τ − 1]` is agent `a`'s observed cost τ steps after
/// `cycle_start`. Steps are scanned in time order and, within a step, agents
/// in declaration order; the first firing pair is returned.
pub fn qad_run<S: Scalar>(
    streams: &[AgentCostStream<S>],
    observed: &[Vec<S>],
    n: usize,
    cycle_start: usize,
    detector_name: &str,
) -> Result<Option<DetectionEvent<S>>> {
    qad_run_with(streams, observed, n, cycle_start, detector_name, |_, _, _| false)
}

/// [`qad_run`] with a predicate that excludes `(agent index, τ, observed)`
/// triples from monitoring.
pub fn qad_run_with<S: Scalar>(
    streams: &[AgentCostStream<S>],
    observed: &[Vec<S>],
    n: usize,
    cycle_start: usize,
    detector_name: &str,
    skip: impl Fn(usize, usize, S) -> bool,
) -> Result<Option<DetectionEvent<S>>> {
    if streams.len() != observed.len() {
        return invalid(format!(
            "{} cost streams but {} observed streams",
            streams.len(),
            observed.len()
        ));
    }
    let horizon = streams.first().map_or(0, |s| s.sets.len());
    for (s, o) in streams.iter().zip(observed) {
        if s.sets.len() != horizon || o.len() != horizon {
            return invalid(format!("agent {} streams are not aligned on {horizon} steps", s.agent_id));
        }
        if s.sets.iter().any(|set| n >= set.len()) {
            return invalid(format!("rank offset n = {n} exceeds a sample set of agent {}", s.agent_id));
        }
    }
    for tau in 1..=horizon {
        for (a, (s, o)) in streams.iter().zip(observed).enumerate() {
            let set = &s.sets[tau - 1];
            let c = o[tau - 1];
            if skip(a, tau, c) {
                continue;
            }
            if detect_step(c, set, n)? {
                return Ok(Some(DetectionEvent {
                    wall_step: cycle_start + tau,
                    agent_id: s.agent_id,
                    observed_cost: c,
                    rank_threshold_cost: set.order_statistic(set.len() - n),
                    detector_name: detector_name.to_string(),
                }));
            }
        }
    }
    Ok(None)
}
