//! Domain types shared by every module: planar geometry, agent states,
//! controls, trajectories, predictions and the scenario schema.

mod prediction;
mod scenario;

pub use prediction::{GaussianComponent, ManeuverLabel, ManeuverMode, PredictionSet, StepMixture};
pub use scenario::{
    AgentId, AnomalyInjection, Circle, DetectionEvent, DetectorConfig, ModeSegment, Scenario,
    ScriptedAgent,
};

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Planar vector in meters (or m/s). Serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Vec2<S> {
    #[inline]
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero())
    }

    /// Unit vector at `theta` radians.
    #[inline]
    pub fn from_angle(theta: S) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s)
    }

    #[inline]
    pub fn dot(self, o: Self) -> S {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn norm_sq(self) -> S {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> S {
        self.x.hypot(self.y)
    }

    /// Counter-clockwise perpendicular.
    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<S: Scalar> Add for Vec2<S> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<S: Scalar> Sub for Vec2<S> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<S: Scalar> Mul<S> for Vec2<S> {
    type Output = Self;
    #[inline]
    fn mul(self, k: S) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl<S: Scalar> Neg for Vec2<S> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl<S: Serialize> Serialize for Vec2<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        (&self.x, &self.y).serialize(s)
    }
}

impl<'de, S: Deserialize<'de>> Deserialize<'de> for Vec2<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [x, y] = <[S; 2]>::deserialize(d)?;
        Ok(Self { x, y })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentClass {
    Vehicle,
    Pedestrian,
}

impl AgentClass {
    /// Collision-circle radius in meters.
    pub fn radius<S: Scalar>(self) -> S {
        match self {
            AgentClass::Vehicle => S::lit(1.0),
            AgentClass::Pedestrian => S::lit(0.2),
        }
    }
}

/// Kinematic state of one agent. Velocity is `speed` along `heading`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState<S> {
    pub position: Vec2<S>,
    pub heading: S,
    pub speed: S,
    #[serde(rename = "class")]
    pub agent_class: AgentClass,
}

impl<S: Scalar> AgentState<S> {
    pub fn new(position: Vec2<S>, heading: S, speed: S, agent_class: AgentClass) -> Self {
        Self {
            position,
            heading,
            speed,
            agent_class,
        }
    }

    #[inline]
    pub fn velocity(&self) -> Vec2<S> {
        Vec2::from_angle(self.heading) * self.speed
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.position.is_finite() && self.heading.is_finite() && self.speed.is_finite()
    }
}

/// Unicycle control: longitudinal acceleration (m/s²) and turn rate (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput<S> {
    pub acceleration: S,
    pub turn_rate: S,
}

impl<S: Scalar> ControlInput<S> {
    pub fn new(acceleration: S, turn_rate: S) -> Self {
        Self {
            acceleration,
            turn_rate,
        }
    }

    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero())
    }
}

/// Time-indexed path of one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S> {
    pub start_time: usize,
    pub dt: S,
    pub states: Vec<AgentState<S>>,
    #[serde(default = "Option::default", skip_serializing_if = "Option::is_none")]
    pub controls: Option<Vec<ControlInput<S>>>,
}

impl<S: Scalar> Trajectory<S> {
    pub fn new(
        start_time: usize,
        dt: S,
        states: Vec<AgentState<S>>,
        controls: Option<Vec<ControlInput<S>>>,
    ) -> Result<Self> {
        let t = Self {
            start_time,
            dt,
            states,
            controls,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.states.is_empty() {
            return invalid("trajectory has no states");
        }
        if !(self.dt > S::zero()) {
            return invalid("trajectory dt must be positive");
        }
        if let Some(c) = &self.controls {
            if c.len() + 1 != self.states.len() {
                return invalid(format!(
                    "trajectory has {} states but {} controls",
                    self.states.len(),
                    c.len()
                ));
            }
        }
        Ok(())
    }

    /// Number of steps after the initial state.
    pub fn horizon(&self) -> usize {
        self.states.len() - 1
    }

    /// Time span covered, in seconds.
    pub fn duration(&self) -> S {
        self.dt * S::lit(self.horizon() as f64)
    }

    /// Rolls a unicycle forward from `init` under `controls`.
    pub fn rollout(start_time: usize, dt: S, init: AgentState<S>, controls: Vec<ControlInput<S>>) -> Self {
        let mut states = Vec::with_capacity(controls.len() + 1);
        states.push(init);
        let mut s = init;
        for u in &controls {
            s = unicycle_step(&s, u, dt);
            states.push(s);
        }
        Self {
            start_time,
            dt,
            states,
            controls: Some(controls),
        }
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn normalize_heading<S: Scalar>(theta: S) -> Result<S> {
    if !theta.is_finite() {
        return invalid("heading must be finite");
    }
    Ok(wrap_angle(theta))
}

#[inline]
pub(crate) fn wrap_angle<S: Scalar>(theta: S) -> S {
    let pi = S::PI();
    let two_pi = pi + pi;
    if theta > -pi && theta <= pi {
        return theta;
    }
    let mut r = (theta + pi) % two_pi;
    if r < S::zero() {
        r = r + two_pi;
    }
    // r in [0, 2π) so r - π in [-π, π); move the left endpoint over.
    let r = r - pi;
    if r <= -pi {
        r + two_pi
    } else {
        r
    }
}

/// Euler step of the unicycle. Position uses the pre-update speed and heading.
#[inline]
pub fn unicycle_step<S: Scalar>(state: &AgentState<S>, u: &ControlInput<S>, dt: S) -> AgentState<S> {
    AgentState {
        position: state.position + state.velocity() * dt,
        heading: wrap_angle(state.heading + u.turn_rate * dt),
        speed: state.speed + u.acceleration * dt,
        agent_class: state.agent_class,
    }
}

/// Unicycle step for non-ego agents, which never reverse.
#[inline]
pub fn agent_step<S: Scalar>(state: &AgentState<S>, u: &ControlInput<S>, dt: S) -> AgentState<S> {
    let mut next = unicycle_step(state, u, dt);
    if next.speed < S::zero() {
        next.speed = S::zero();
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn veh(x: f64, y: f64, h: f64, v: f64) -> AgentState<f64> {
        AgentState::new(Vec2::new(x, y), h, v, AgentClass::Vehicle)
    }

    #[test]
    fn heading_examples() {
        assert_eq!(normalize_heading(0.0).unwrap(), 0.0);
        assert!((normalize_heading(3.0 * PI).unwrap() - PI).abs() < 1e-12);
        assert_eq!(normalize_heading(-PI).unwrap(), PI);
        assert!(normalize_heading(f64::NAN).is_err());
        assert!(normalize_heading(f64::INFINITY).is_err());
    }

    #[test]
    fn unicycle_examples() {
        let s = unicycle_step(&veh(0.0, 0.0, 0.0, 5.0), &ControlInput::new(0.0, 0.0), 0.5);
        assert_eq!(s.position, Vec2::new(2.5, 0.0));
        assert_eq!((s.heading, s.speed), (0.0, 5.0));

        let s = unicycle_step(&veh(3.0, -1.0, 0.2, 0.0), &ControlInput::new(0.0, 0.7), 0.5);
        assert_eq!(s.position, Vec2::new(3.0, -1.0));

        let s = unicycle_step(&veh(0.0, 0.0, 0.0, 2.0), &ControlInput::new(1.0, 0.0), 0.5);
        assert_eq!(s.speed, 2.5);
        assert_eq!(s.position, Vec2::new(1.0, 0.0));
    }

    #[test]
    fn agent_step_clamps_reverse() {
        let s = agent_step(&veh(0.0, 0.0, 0.0, 0.5), &ControlInput::new(-4.0, 0.0), 0.5);
        assert_eq!(s.speed, 0.0);
    }

    #[test]
    fn trajectory_validation() {
        assert!(Trajectory::<f64>::new(0, 0.5, vec![], None).is_err());
        assert!(Trajectory::new(0, 0.0, vec![veh(0.0, 0.0, 0.0, 1.0)], None).is_err());
        assert!(Trajectory::new(0, 0.5, vec![veh(0.0, 0.0, 0.0, 1.0)], Some(vec![ControlInput::zero()])).is_err());
        let t = Trajectory::rollout(0, 0.5, veh(0.0, 0.0, 0.0, 1.0), vec![ControlInput::zero(); 3]);
        assert!(t.validate().is_ok());
        assert_eq!(t.horizon(), 3);
    }

    #[test]
    fn generic_over_f32() {
        let s = AgentState::<f32>::new(Vec2::new(0.0, 0.0), 0.0, 4.0, AgentClass::Pedestrian);
        let n = unicycle_step(&s, &ControlInput::new(0.0, 0.0), 0.5);
        assert_eq!(n.position.x, 2.0f32);
        assert!((normalize_heading(3.0f32 * std::f32::consts::PI).unwrap() - std::f32::consts::PI).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn wrap_is_in_range_and_congruent(theta in -1.0e3f64..1.0e3) {
            let w = normalize_heading(theta).unwrap();
            prop_assert!(w > -PI && w <= PI);
            let k = ((theta - w) / (2.0 * PI)).round();
            prop_assert!((theta - w - k * 2.0 * PI).abs() < 1e-9);
        }

        #[test]
        fn zero_control_is_straight(x in -50.0f64..50.0, y in -50.0f64..50.0, h in -3.0f64..3.0, v in -20.0f64..20.0, dt in 0.01f64..2.0) {
            let s = veh(x, y, h, v);
            let n = unicycle_step(&s, &ControlInput::zero(), dt);
            prop_assert_eq!(n.speed, v);
            prop_assert_eq!(n.heading, s.heading);
            let moved = (n.position - s.position).norm();
            prop_assert!((moved - v.abs() * dt).abs() <= 1e-12 * (1.0 + v.abs() * dt + x.abs() + y.abs()));
        }
    }
}
