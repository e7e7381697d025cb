//! Sampled adversarial reachability.
//!
//! Instead of solving a Hamilton-Jacobi value function, the agent is driven
//! by many admissible control sequences and checked for circle overlap with
//! the ego's committed plan. Vehicles follow a kinematic bicycle with
//! bounded acceleration and steering; pedestrians accelerate freely inside a
//! box. The schedule is nested: sequence `j` never depends on the budget, so
//! a larger budget only adds rollouts.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{AgentClass, AgentState, Trajectory, Vec2};
use crate::rng;
use crate::scalar::Scalar;
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReachConfig {
    pub accel_min: f64,
    pub accel_max: f64,
    pub steer_max_deg: f64,
    pub wheelbase: f64,
    /// Per-axis pedestrian acceleration bound (m/s²).
    pub pedestrian_accel: f64,
    /// Integration substeps per planning step.
    pub substeps: usize,
    /// Number of control sequences tried per agent.
    pub budget: usize,
}

impl Default for ReachConfig {
    fn default() -> Self {
        Self {
            accel_min: -2.0,
            accel_max: 1.0,
            steer_max_deg: 10.0,
            wheelbase: 4.0,
            pedestrian_accel: 0.5,
            substeps: 4,
            budget: 64,
        }
    }
}

impl ReachConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 || self.substeps == 0 {
            return invalid("reachability budget and substeps must be positive");
        }
        if !(self.accel_min <= self.accel_max && self.steer_max_deg >= 0.0 && self.wheelbase > 0.0 && self.pedestrian_accel >= 0.0) {
            return invalid("malformed reachability control bounds");
        }
        Ok(())
    }

    /// Constant extremal controls tried first: `(u1, u2)` pairs, read as
    /// (acceleration, steering radians) for vehicles and as an acceleration
    /// vector for pedestrians.
    fn corners(&self, class: AgentClass) -> Vec<(f64, f64)> {
        match class {
            AgentClass::Vehicle => {
                let s = self.steer_max_deg.to_radians();
                let mut v = Vec::new();
                for a in [self.accel_max, self.accel_min, 0.0] {
                    for d in [0.0, s, -s] {
                        v.push((a, d));
                    }
                }
                v
            }
            AgentClass::Pedestrian => {
                let b = self.pedestrian_accel;
                vec![(0.0, 0.0), (b, 0.0), (-b, 0.0), (0.0, b), (0.0, -b), (b, b), (b, -b), (-b, b), (-b, -b)]
            }
        }
    }

    fn random_control(&self, class: AgentClass, r: &mut impl Rng) -> (f64, f64) {
        match class {
            AgentClass::Vehicle => {
                let s = self.steer_max_deg.to_radians();
                (r.random_range(self.accel_min..=self.accel_max), r.random_range(-s..=s))
            }
            AgentClass::Pedestrian => {
                let b = self.pedestrian_accel;
                (r.random_range(-b..=b), r.random_range(-b..=b))
            }
        }
    }
}

/// Internal agent state: position, heading, speed for vehicles; position and
/// velocity for pedestrians.
#[derive(Clone, Copy)]
struct Body {
    p: Vec2<f64>,
    heading: f64,
    speed: f64,
    v: Vec2<f64>,
}

fn advance(b: &mut Body, class: AgentClass, u: (f64, f64), h: f64, wheelbase: f64) {
    match class {
        AgentClass::Vehicle => {
            let vel = Vec2::from_angle(b.heading) * b.speed;
            b.p = b.p + vel * h;
            b.heading += b.speed / wheelbase * u.1.tan() * h;
            b.speed = (b.speed + u.0 * h).max(0.0);
        }
        AgentClass::Pedestrian => {
            b.p = b.p + b.v * h;
            b.v = b.v + Vec2::new(u.0, u.1) * h;
        }
    }
}

/// Smallest signed gap `|p_agent − p_ego| − (r_ego + r_agent)` along one
/// rollout. Ego positions between plan states are linearly interpolated.
fn rollout_gap(ego: &[Vec2<f64>], radii: f64, start: Body, class: AgentClass, controls: &[(f64, f64)], cfg: &ReachConfig, dt: f64) -> f64 {
    let mut b = start;
    let h = dt / cfg.substeps as f64;
    let mut best = (b.p - ego[0]).norm() - radii;
    for (k, u) in controls.iter().enumerate() {
        for s in 1..=cfg.substeps {
            advance(&mut b, class, *u, h, cfg.wheelbase);
            let f = s as f64 / cfg.substeps as f64;
            let e = ego[k] + (ego[k + 1] - ego[k]) * f;
            best = best.min((b.p - e).norm() - radii);
        }
    }
    best
}

/// Minimum gap over the first `cfg.budget` sequences of the nested
/// schedule (negative means overlap). Sequence `j` of the random part is
/// drawn from its own stream keyed by `seed` and `j`.
pub fn reach_min_gap<S: Scalar>(ego_plan: &Trajectory<S>, agent: &AgentState<S>, cfg: &ReachConfig, seed: u64) -> Result<f64> {
    cfg.validate()?;
    let horizon = ego_plan.horizon();
    if horizon == 0 {
        return invalid("ego plan has no steps");
    }
    let ego: Vec<Vec2<f64>> = ego_plan.states.iter().map(|s| Vec2::new(s.position.x.as_f64(), s.position.y.as_f64())).collect();
    let class = agent.agent_class;
    let radii = ego_plan.states[0].agent_class.radius::<f64>() + class.radius::<f64>();
    let (hd, sp) = (agent.heading.as_f64(), agent.speed.as_f64());
    let start = Body {
        p: Vec2::new(agent.position.x.as_f64(), agent.position.y.as_f64()),
        heading: hd,
        speed: sp,
        v: Vec2::from_angle(hd) * sp,
    };
    let dt = ego_plan.dt.as_f64();
    let corners = cfg.corners(class);
    let mut best = f64::INFINITY;
    let mut seq = vec![(0.0, 0.0); horizon];
    for j in 0..cfg.budget {
        if j < corners.len() {
            seq.iter_mut().for_each(|u| *u = corners[j]);
        } else {
            let mut r = rng::stream(seed, &[rng::tag::REACH, j as u64]);
            seq.iter_mut().for_each(|u| *u = cfg.random_control(class, &mut r));
        }
        best = best.min(rollout_gap(&ego, radii, start, class, &seq, cfg, dt));
    }
    Ok(best)
}

/// True iff some sampled admissible behavior overlaps the ego's plan.
pub fn adversarial_reach_detect<S: Scalar>(ego_plan: &Trajectory<S>, agent: &AgentState<S>, cfg: &ReachConfig, seed: u64) -> Result<bool> {
    Ok(reach_min_gap(ego_plan, agent, cfg, seed)? < 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ControlInput;
    use std::f64::consts::PI;

    fn veh(x: f64, y: f64, h: f64, v: f64) -> AgentState<f64> {
        AgentState::new(Vec2::new(x, y), h, v, AgentClass::Vehicle)
    }

    fn ego_plan(v: f64) -> Trajectory<f64> {
        Trajectory::rollout(0, 0.5, veh(0.0, 0.0, 0.0, v), vec![ControlInput::zero(); 4])
    }

    #[test]
    fn far_slow_agent_is_unreachable() {
        let cfg = ReachConfig::default();
        let a = AgentState::new(Vec2::new(60.0, 40.0), 0.0, 0.5, AgentClass::Pedestrian);
        assert!(!adversarial_reach_detect(&ego_plan(5.0), &a, &cfg, 1).unwrap());
    }

    #[test]
    fn close_closing_agent_overlaps() {
        let cfg = ReachConfig { budget: 1, ..ReachConfig::default() };
        let a = veh(3.0, 0.0, PI, 5.0);
        assert!(adversarial_reach_detect(&ego_plan(5.0), &a, &cfg, 1).unwrap());
    }

    /// Dense grid over constant controls, the same integrator.
    fn grid_gap(plan: &Trajectory<f64>, a: &AgentState<f64>, cfg: &ReachConfig) -> f64 {
        let ego: Vec<Vec2<f64>> = plan.states.iter().map(|s| s.position).collect();
        let start = Body { p: a.position, heading: a.heading, speed: a.speed, v: a.velocity() };
        let s = cfg.steer_max_deg.to_radians();
        let mut best = f64::INFINITY;
        for i in 0..=60 {
            for k in 0..=60 {
                let acc = cfg.accel_min + (cfg.accel_max - cfg.accel_min) * i as f64 / 60.0;
                let steer = -s + 2.0 * s * k as f64 / 60.0;
                let seq = vec![(acc, steer); plan.horizon()];
                best = best.min(rollout_gap(&ego, 2.0, start, AgentClass::Vehicle, &seq, cfg, plan.dt));
            }
        }
        best
    }

    #[test]
    fn marginal_cases_match_grid_search() {
        let cfg = ReachConfig { budget: 300, ..ReachConfig::default() };
        let plan = ego_plan(6.0);
        // A crossing car whose reach just touches, and one just short of it.
        for (y, expect) in [(-9.0, true), (-13.0, false)] {
            let a = veh(8.0, y, PI / 2.0, 4.0);
            let grid = grid_gap(&plan, &a, &cfg);
            assert_eq!(grid < 0.0, expect, "grid gap {grid}");
            assert_eq!(adversarial_reach_detect(&plan, &a, &cfg, 3).unwrap(), expect);
        }
    }

    #[test]
    fn budget_is_nested() {
        let plan = ego_plan(6.0);
        let agents = [veh(8.0, -9.5, PI / 2.0, 4.0), veh(14.0, 3.0, -PI / 2.0, 3.0), veh(25.0, 0.5, PI, 6.0)];
        for a in &agents {
            let mut prev = f64::INFINITY;
            for budget in [1, 5, 9, 20, 80] {
                let cfg = ReachConfig { budget, ..ReachConfig::default() };
                let g = reach_min_gap(&plan, a, &cfg, 17).unwrap();
                assert!(g <= prev);
                prev = g;
            }
        }
    }

    #[test]
    fn invalid_config() {
        let cfg = ReachConfig { budget: 0, ..ReachConfig::default() };
        assert!(reach_min_gap(&ego_plan(1.0), &veh(0.0, 5.0, 0.0, 0.0), &cfg, 0).is_err());
    }
}
