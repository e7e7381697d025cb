use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AgentState, ManeuverLabel, ManeuverMode, Trajectory, Vec2};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Switch to `label` from `start_step` on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSegment {
    pub start_step: usize,
    pub label: ManeuverLabel,
}

/// A non-ego agent: initial state, the mode library the predictor samples
/// from, and the script it actually follows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedAgent<S> {
    pub id: AgentId,
    pub init: AgentState<S>,
    pub modes: Vec<ManeuverMode<S>>,
    pub schedule: Vec<ModeSegment>,
}

impl<S: Scalar> ScriptedAgent<S> {
    /// Scripted label at `step` (ignoring injections).
    pub fn scripted_label(&self, step: usize) -> ManeuverLabel {
        self.schedule
            .iter()
            .filter(|s| s.start_step <= step)
            .max_by_key(|s| s.start_step)
            .map(|s| s.label)
            .unwrap_or(ManeuverLabel::ConstantVelocity)
    }

    /// Nominal control and noise for a label: the library entry if present,
    /// otherwise the class default without noise.
    pub fn mode_for(&self, label: ManeuverLabel) -> ManeuverMode<S> {
        self.modes
            .iter()
            .find(|m| m.label == label)
            .copied()
            .unwrap_or_else(|| ManeuverMode {
                label,
                control: label.nominal_control(self.init.agent_class),
                accel_std: S::zero(),
                turn_std: S::zero(),
                weight: S::zero(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle<S> {
    pub center: Vec2<S>,
    pub radius: S,
}

fn default_injection_duration() -> usize {
    4
}

/// Forces an agent into `injected_mode` for `duration_steps` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyInjection {
    pub agent_id: AgentId,
    pub start_step: usize,
    pub injected_mode: ManeuverLabel,
    #[serde(default = "default_injection_duration")]
    pub duration_steps: usize,
    /// Filled in by the labeling oracle after simulation.
    #[serde(default)]
    pub task_relevant_flag: Option<bool>,
}

impl AnomalyInjection {
    pub fn active_at(&self, step: usize) -> bool {
        step >= self.start_step && step < self.start_step + self.duration_steps
    }

    /// True when the injection window intersects `[start, start + len)`.
    pub fn overlaps(&self, start: usize, len: usize) -> bool {
        self.start_step < start + len && start < self.start_step + self.duration_steps
    }
}

fn default_scene_type() -> String {
    "generic".to_string()
}

/// A scripted scene. `seed` determines every stochastic draw of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario<S> {
    pub id: String,
    #[serde(default = "default_scene_type")]
    pub scene_type: String,
    /// Number of simulation steps.
    pub duration: usize,
    pub dt: S,
    pub ego_init: AgentState<S>,
    pub goal: Vec2<S>,
    pub reference_trajectory: Trajectory<S>,
    pub agents: Vec<ScriptedAgent<S>>,
    #[serde(default)]
    pub static_obstacles: Vec<Circle<S>>,
    #[serde(default)]
    pub injections: Vec<AnomalyInjection>,
    pub seed: u64,
    /// Scale applied to each mode's noise when the agent executes its script.
    /// Zero means agents follow nominal controls exactly.
    #[serde(default)]
    pub truth_noise_scale: S,
}

impl<S: Scalar> Scenario<S> {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Schema(format!("scenario {}: {m}", self.id)));
        if self.duration == 0 {
            return fail("duration must be positive".into());
        }
        if !(self.dt > S::zero()) {
            return fail("dt must be positive".into());
        }
        if let Err(e) = self.reference_trajectory.validate() {
            return fail(e.to_string());
        }
        if self.reference_trajectory.horizon() < self.duration {
            return fail(format!(
                "reference trajectory covers {} steps, duration is {}",
                self.reference_trajectory.horizon(),
                self.duration
            ));
        }
        if !self.ego_init.is_finite() || !self.goal.is_finite() {
            return fail("non-finite ego state or goal".into());
        }
        if self.truth_noise_scale < S::zero() {
            return fail("truth_noise_scale must be nonnegative".into());
        }
        let mut ids = HashSet::new();
        for a in &self.agents {
            if !ids.insert(a.id) {
                return fail(format!("duplicate agent id {}", a.id));
            }
            if !a.init.is_finite() {
                return fail(format!("agent {} has a non-finite initial state", a.id));
            }
            if a.modes.is_empty() {
                return fail(format!("agent {} has an empty mode library", a.id));
            }
            let total: S = a.modes.iter().map(|m| m.weight).sum();
            if (total - S::one()).abs() > S::lit(1e-6) {
                return fail(format!("agent {} mode weights sum to {total}", a.id));
            }
            if a.modes.iter().any(|m| m.weight < S::zero() || m.accel_std < S::zero() || m.turn_std < S::zero()) {
                return fail(format!("agent {} has a negative mode weight or noise", a.id));
            }
        }
        for inj in &self.injections {
            let Some(agent) = self.agents.iter().find(|a| a.id == inj.agent_id) else {
                return fail(format!("injection targets unknown agent {}", inj.agent_id));
            };
            if inj.start_step >= self.duration {
                return fail(format!("injection start {} outside duration", inj.start_step));
            }
            if inj.duration_steps == 0 {
                return fail("injection duration must be positive".into());
            }
            if agent.scripted_label(inj.start_step) == inj.injected_mode {
                return fail(format!(
                    "injection on agent {} at step {} repeats the scripted mode",
                    inj.agent_id, inj.start_step
                ));
            }
        }
        Ok(())
    }

    pub fn agent(&self, id: AgentId) -> Option<&ScriptedAgent<S>> {
        self.agents.iter().find(|a| a.id == id)
    }

    /// Label an agent executes at `step`, with injections applied.
    pub fn executed_label(&self, agent: &ScriptedAgent<S>, step: usize) -> ManeuverLabel {
        self.injections
            .iter()
            .find(|i| i.agent_id == agent.id && i.active_at(step))
            .map(|i| i.injected_mode)
            .unwrap_or_else(|| agent.scripted_label(step))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Detector calibration: `m` samples, rank offset `n`, quantile `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub m: usize,
    pub n: usize,
    pub p: f64,
}

impl DetectorConfig {
    pub fn new(m: usize, n: usize, p: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("M must be at least 1".into()));
        }
        if n >= m {
            return Err(Error::InvalidArgument(format!("n = {n} must be below M = {m}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidArgument(format!("p = {p} must lie in (0, 1)")));
        }
        Ok(Self { m, n, p })
    }

    /// 1-indexed rank of the order statistic the detector compares against.
    pub fn rank(&self) -> usize {
        self.m - self.n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionEvent<S> {
    pub wall_step: usize,
    pub agent_id: AgentId,
    pub observed_cost: S,
    pub rank_threshold_cost: S,
    pub detector_name: String,
}
