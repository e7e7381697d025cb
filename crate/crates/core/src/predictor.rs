//! Synthetic multi-modal trajectory predictor.
//!
//! Each agent carries a library of maneuver modes. A prediction sample picks
//! a mode by weight, perturbs its nominal controls with independent Gaussian
//! noise at every step and rolls the agent forward. Per-step Gaussian
//! mixtures are then fit to the samples (one component per used mode) for
//! the likelihood baseline.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::model::{
    agent_step, AgentId, AgentState, ControlInput, GaussianComponent, ManeuverMode, PredictionSet,
    StepMixture, Trajectory, Vec2,
};
use crate::rng;
use crate::scalar::Scalar;

/// Diagonal floor added to fitted covariances (m²).
pub const COVARIANCE_FLOOR: f64 = 1e-6;

fn check_modes<S: Scalar>(modes: &[ManeuverMode<S>]) -> Result<()> {
    if modes.is_empty() {
        return invalid("mode set is empty");
    }
    let total: S = modes.iter().map(|m| m.weight).sum();
    if modes.iter().any(|m| m.weight < S::zero()) || (total - S::one()).abs() > S::lit(1e-6) {
        return invalid(format!("mode weights must be nonnegative and sum to 1 (got {total})"));
    }
    Ok(())
}

/// Index of the mode selected by a uniform draw `u ∈ [0, 1)`.
fn pick_mode<S: Scalar>(modes: &[ManeuverMode<S>], u: f64) -> usize {
    let mut cum = 0.0;
    let mut last_positive = 0;
    for (i, m) in modes.iter().enumerate() {
        let w = m.weight.as_f64();
        if w > 0.0 {
            last_positive = i;
            cum += w;
            if u < cum {
                return i;
            }
        }
    }
    last_positive
}

/// Noisy control for one step of `mode`, scaled by `noise_scale`.
pub fn perturbed_control<S: Scalar>(mode: &ManeuverMode<S>, noise_scale: S, rng: &mut ChaCha8Rng) -> ControlInput<S> {
    let za: f64 = StandardNormal.sample(rng);
    let zw: f64 = StandardNormal.sample(rng);
    ControlInput::new(
        mode.control.acceleration + mode.accel_std * noise_scale * S::lit(za),
        mode.control.turn_rate + mode.turn_std * noise_scale * S::lit(zw),
    )
}

/// One predicted trajectory and the index of the mode it came from.
pub fn sample_trajectory<S: Scalar>(
    agent: &AgentState<S>,
    modes: &[ManeuverMode<S>],
    horizon: usize,
    dt: S,
    start_time: usize,
    rng: &mut ChaCha8Rng,
) -> (Trajectory<S>, usize) {
    let k = pick_mode(modes, rng.random::<f64>());
    let mode = &modes[k];
    let mut states = Vec::with_capacity(horizon + 1);
    let mut s = *agent;
    states.push(s);
    for _ in 0..horizon {
        let u = perturbed_control(mode, S::one(), rng);
        s = agent_step(&s, &u, dt);
        states.push(s);
    }
    (
        Trajectory {
            start_time,
            dt,
            states,
            controls: None,
        },
        k,
    )
}

/// Per-step mixture fit: one component per mode that produced samples,
/// weighted by its share, with the mode-conditional sample mean and
/// (biased) covariance plus a diagonal floor.
pub fn fit_mixture<S: Scalar>(samples: &[Trajectory<S>], sample_modes: &[usize], n_modes: usize, horizon: usize) -> Vec<StepMixture<S>> {
    let total = S::lit(samples.len() as f64);
    let floor = S::lit(COVARIANCE_FLOOR);
    (1..=horizon)
        .map(|tau| {
            let mut components = Vec::new();
            for k in 0..n_modes {
                let pts: Vec<Vec2<S>> = samples
                    .iter()
                    .zip(sample_modes)
                    .filter(|(_, m)| **m == k)
                    .map(|(t, _)| t.states[tau].position)
                    .collect();
                if pts.is_empty() {
                    continue;
                }
                let cnt = S::lit(pts.len() as f64);
                let mean = pts.iter().fold(Vec2::zero(), |a, p| a + *p) * (S::one() / cnt);
                let (mut sxx, mut sxy, mut syy) = (S::zero(), S::zero(), S::zero());
                for p in &pts {
                    let d = *p - mean;
                    sxx = sxx + d.x * d.x;
                    sxy = sxy + d.x * d.y;
                    syy = syy + d.y * d.y;
                }
                components.push(GaussianComponent {
                    weight: cnt / total,
                    mean,
                    cov: [[sxx / cnt + floor, sxy / cnt], [sxy / cnt, syy / cnt + floor]],
                });
            }
            StepMixture { components }
        })
        .collect()
}

/// Draws `m` i.i.d. predictions for one agent.
///
/// Sample `i` uses its own RNG sub-stream derived from `(stream_seed, i)`,
/// so the result depends only on the seed, not on evaluation order.
pub fn sample_predictions<S: Scalar>(
    agent_id: AgentId,
    agent: &AgentState<S>,
    modes: &[ManeuverMode<S>],
    m: usize,
    horizon: usize,
    dt: S,
    start_time: usize,
    stream_seed: u64,
) -> Result<PredictionSet<S>> {
    check_modes(modes)?;
    if m == 0 || horizon == 0 {
        return invalid("need M ≥ 1 samples over a horizon T ≥ 1");
    }
    if !(dt > S::zero()) {
        return invalid("dt must be positive");
    }
    let (samples, sample_modes): (Vec<_>, Vec<_>) = (0..m)
        .map(|i| {
            let mut r = rng::stream(stream_seed, &[i as u64]);
            sample_trajectory(agent, modes, horizon, dt, start_time, &mut r)
        })
        .unzip();
    let mixture = fit_mixture(&samples, &sample_modes, modes.len(), horizon);
    Ok(PredictionSet {
        agent_id,
        horizon,
        samples,
        sample_modes,
        mixture,
    })
}

/// Log of a bivariate normal density. Non-positive-definite covariances get
/// the diagonal floor added until they are.
fn gaussian_log_pdf<S: Scalar>(c: &GaussianComponent<S>, x: Vec2<S>) -> S {
    let floor = S::lit(COVARIANCE_FLOOR);
    let [[mut a, b], [_, mut d]] = c.cov;
    let mut det = a * d - b * b;
    let mut guard = 0;
    while !(det > S::zero()) && guard < 60 {
        a = a + floor;
        d = d + floor;
        det = a * d - b * b;
        guard += 1;
    }
    let r = x - c.mean;
    let quad = (d * r.x * r.x - (b + b) * r.x * r.y + a * r.y * r.y) / det;
    -(S::lit(2.0) * S::PI()).ln() - S::lit(0.5) * det.ln() - S::lit(0.5) * quad
}

/// `log Σ_k w_k N(x; μ_k, Σ_k)`, computed with log-sum-exp.
pub fn gmm_log_density<S: Scalar>(mixture: &StepMixture<S>, x: Vec2<S>) -> S {
    let terms: Vec<S> = mixture
        .components
        .iter()
        .filter(|c| c.weight > S::zero())
        .map(|c| c.weight.ln() + gaussian_log_pdf(c, x))
        .collect();
    let mx = terms.iter().copied().fold(S::neg_infinity(), S::max);
    if mx == S::neg_infinity() {
        return mx;
    }
    mx + terms.iter().map(|t| (*t - mx).exp()).sum::<S>().ln()
}

impl<S: Scalar> PredictionSet<S> {
    /// Mixture log-density of a position `step` steps ahead (1-based).
    pub fn log_density(&self, step: usize, x: Vec2<S>) -> Result<S> {
        if step == 0 || step > self.mixture.len() {
            return invalid(format!("step {step} outside prediction horizon {}", self.mixture.len()));
        }
        Ok(gmm_log_density(&self.mixture[step - 1], x))
    }
}
