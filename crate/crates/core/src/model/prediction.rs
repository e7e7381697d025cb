use serde::{Deserialize, Serialize};

use super::{AgentClass, ControlInput, Trajectory, Vec2};
use super::scenario::AgentId;
use crate::scalar::Scalar;

/// The six scripted maneuver families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManeuverLabel {
    ConstantVelocity,
    Brake,
    Accelerate,
    TurnLeft,
    TurnRight,
    Stop,
}

impl ManeuverLabel {
    pub const ALL: [ManeuverLabel; 6] = [
        ManeuverLabel::ConstantVelocity,
        ManeuverLabel::Brake,
        ManeuverLabel::Accelerate,
        ManeuverLabel::TurnLeft,
        ManeuverLabel::TurnRight,
        ManeuverLabel::Stop,
    ];

    /// Default nominal control for an agent class.
    pub fn nominal_control<S: Scalar>(self, class: AgentClass) -> ControlInput<S> {
        let (a, w) = match (class, self) {
            (_, ManeuverLabel::ConstantVelocity) => (0.0, 0.0),
            (AgentClass::Vehicle, ManeuverLabel::Brake) => (-2.0, 0.0),
            (AgentClass::Vehicle, ManeuverLabel::Accelerate) => (1.0, 0.0),
            (AgentClass::Vehicle, ManeuverLabel::TurnLeft) => (0.0, 0.3),
            (AgentClass::Vehicle, ManeuverLabel::TurnRight) => (0.0, -0.3),
            (AgentClass::Vehicle, ManeuverLabel::Stop) => (-4.0, 0.0),
            (AgentClass::Pedestrian, ManeuverLabel::Brake) => (-0.5, 0.0),
            (AgentClass::Pedestrian, ManeuverLabel::Accelerate) => (0.5, 0.0),
            (AgentClass::Pedestrian, ManeuverLabel::TurnLeft) => (0.0, 0.8),
            (AgentClass::Pedestrian, ManeuverLabel::TurnRight) => (0.0, -0.8),
            (AgentClass::Pedestrian, ManeuverLabel::Stop) => (-1.5, 0.0),
        };
        ControlInput::new(S::lit(a), S::lit(w))
    }
}

/// One component of an agent's behavior mixture: nominal controls perturbed
/// by independent Gaussian noise at every step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManeuverMode<S> {
    pub label: ManeuverLabel,
    pub control: ControlInput<S>,
    pub accel_std: S,
    pub turn_std: S,
    pub weight: S,
}

impl<S: Scalar> ManeuverMode<S> {
    /// Mode with the class-default nominal control for `label`.
    pub fn standard(label: ManeuverLabel, class: AgentClass, weight: S, accel_std: S, turn_std: S) -> Self {
        Self {
            label,
            control: label.nominal_control(class),
            accel_std,
            turn_std,
            weight,
        }
    }
}

/// Bivariate Gaussian component of a per-step position mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent<S> {
    pub weight: S,
    pub mean: Vec2<S>,
    /// Row-major 2×2 covariance.
    pub cov: [[S; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepMixture<S> {
    pub components: Vec<GaussianComponent<S>>,
}

/// M i.i.d. predicted trajectories for one agent over a horizon of T steps.
///
/// `samples[m].states[0]` is the agent's state at prediction time and
/// `states[τ]` the prediction τ steps ahead. `mixture[τ - 1]` describes the
/// predicted position density τ steps ahead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSet<S> {
    pub agent_id: AgentId,
    pub horizon: usize,
    pub samples: Vec<Trajectory<S>>,
    /// Index into the mode list that generated each sample.
    pub sample_modes: Vec<usize>,
    pub mixture: Vec<StepMixture<S>>,
}

impl<S: Scalar> PredictionSet<S> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}
