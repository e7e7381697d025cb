use crate::model::{AgentState, PredictionSet};
use crate::scalar::Scalar;

/// Only agents within this distance of the ego are scored (m).
pub const LIKELIHOOD_GATE_RADIUS: f64 = 10.0;

/// Largest negative log-density of a realized position over gated
/// `(agent, step)` pairs; `−∞` when nothing is gated in.
///
/// `realized[a][τ−1]` is agent `a`'s realized state at step `τ` and
/// `ego[τ−1]` the ego's; steps past the shortest input are ignored.
pub fn likelihood_score<S: Scalar>(predictions: &[PredictionSet<S>], realized: &[Vec<AgentState<S>>], ego: &[AgentState<S>], gate_radius: S) -> S {
    let mut worst = S::neg_infinity();
    for (p, states) in predictions.iter().zip(realized) {
        let steps = p.mixture.len().min(states.len()).min(ego.len());
        for tau in 1..=steps {
            let x = states[tau - 1].position;
            if (x - ego[tau - 1].position).norm() > gate_radius {
                continue;
            }
            let ld = crate::predictor::gmm_log_density(&p.mixture[tau - 1], x);
            worst = worst.max(-ld);
        }
    }
    worst
}

/// Fires when some gated agent's realized position has mixture log-density
/// below `log_threshold` at some step.
pub fn likelihood_detect<S: Scalar>(predictions: &[PredictionSet<S>], realized: &[Vec<AgentState<S>>], ego: &[AgentState<S>], log_threshold: S, gate_radius: S) -> bool {
    likelihood_score(predictions, realized, ego, gate_radius) > -log_threshold
}
