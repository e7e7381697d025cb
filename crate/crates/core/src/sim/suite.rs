//! Deterministic synthetic scenario suites.
//!
//! Every scene puts the ego on a straight two-lane road at 8 m/s with one
//! primary agent from a template (lead car, adjacent-lane car, oncoming
//! car, pedestrian on the sidewalk, or distant traffic) and optionally a
//! slower neighbor in the right lane. Injections act on the primary agent
//! for exactly one planning cycle. Task-relevant injections steer it into
//! the ego's way (stop, cut in, swerve into the lane, step onto the road);
//! irrelevant ones steer it away. Injected maneuvers are never part of the
//! agent's mode library.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{
    AgentClass, AgentId, AgentState, AnomalyInjection, ControlInput, ManeuverLabel, ManeuverMode, ModeSegment,
    Scenario, ScriptedAgent, Trajectory, Vec2,
};
use crate::rng::{self, tag};

const EGO_SPEED: f64 = 8.0;
const LANE: f64 = 3.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteSpec {
    /// Total planning cycles across the suite (rounded up to whole scenes).
    pub cycles: usize,
    pub cycles_per_scenario: usize,
    pub horizon: usize,
    pub dt: f64,
    /// Fraction of cycles with a task-relevant injection.
    pub positive_rate: f64,
    /// Fraction of cycles with an injection that steers away from the ego.
    pub irrelevant_rate: f64,
    pub truth_noise_scale: f64,
    /// Probability of adding a slower right-lane neighbor.
    pub neighbor_probability: f64,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        Self {
            cycles: 2000,
            cycles_per_scenario: 5,
            horizon: 4,
            dt: 0.5,
            positive_rate: 0.035,
            irrelevant_rate: 0.035,
            truth_noise_scale: 1.0,
            neighbor_probability: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Template {
    Following,
    CutIn,
    Oncoming,
    Crossing,
    Benign,
}

impl Template {
    const ACTIVE: [Template; 4] = [Template::Following, Template::CutIn, Template::Oncoming, Template::Crossing];

    fn name(self) -> &'static str {
        match self {
            Template::Following => "following",
            Template::CutIn => "cut_in",
            Template::Oncoming => "oncoming",
            Template::Crossing => "crossing",
            Template::Benign => "benign",
        }
    }

    /// Injected maneuver toward (`true`) or away from the ego.
    fn injection(self, relevant: bool) -> ManeuverLabel {
        match (self, relevant) {
            (Template::Following, true) => ManeuverLabel::Stop,
            (Template::Following, false) => ManeuverLabel::TurnLeft,
            (Template::CutIn, true) => ManeuverLabel::TurnRight,
            (Template::CutIn, false) => ManeuverLabel::TurnLeft,
            (Template::Oncoming, true) => ManeuverLabel::TurnLeft,
            (Template::Oncoming, false) => ManeuverLabel::TurnRight,
            (Template::Crossing, true) => ManeuverLabel::TurnLeft,
            (Template::Crossing, false) => ManeuverLabel::TurnRight,
            (Template::Benign, _) => ManeuverLabel::ConstantVelocity,
        }
    }
}

fn library(class: AgentClass) -> Vec<ManeuverMode<f64>> {
    let (sa, sw) = match class {
        AgentClass::Vehicle => (0.4, 0.03),
        AgentClass::Pedestrian => (0.2, 0.15),
    };
    vec![
        ManeuverMode::standard(ManeuverLabel::ConstantVelocity, class, 0.90, sa, sw),
        ManeuverMode::standard(ManeuverLabel::Brake, class, 0.04, sa, sw),
        ManeuverMode::standard(ManeuverLabel::Accelerate, class, 0.06, sa, sw),
    ]
}

fn agent(id: u32, x: f64, y: f64, heading: f64, speed: f64, class: AgentClass) -> ScriptedAgent<f64> {
    ScriptedAgent {
        id: AgentId(id),
        init: AgentState::new(Vec2::new(x, y), heading, speed, class),
        modes: library(class),
        schedule: vec![ModeSegment { start_step: 0, label: ManeuverLabel::ConstantVelocity }],
    }
}

/// Primary agent placed so that the interaction happens around `focus`, the
/// cycle in which an injection would start.
fn primary(t: Template, focus: usize, cycle_seconds: f64, r: &mut impl Rng) -> ScriptedAgent<f64> {
    let ego_at = EGO_SPEED * cycle_seconds * focus as f64;
    match t {
        Template::Following => {
            let v = r.random_range(8.5..9.5);
            let gap = r.random_range(6.0..12.0);
            agent(1, ego_at + gap - v * cycle_seconds * focus as f64, 0.0, 0.0, v, AgentClass::Vehicle)
        }
        Template::CutIn => {
            let v = r.random_range(5.5..6.5);
            let ahead = r.random_range(6.0..12.0);
            agent(1, ego_at + ahead - v * cycle_seconds * focus as f64, LANE, 0.0, v, AgentClass::Vehicle)
        }
        Template::Oncoming => {
            let v = r.random_range(6.0..8.0);
            let ahead = r.random_range(28.0..40.0);
            agent(1, ego_at + ahead + v * cycle_seconds * focus as f64, LANE, PI, v, AgentClass::Vehicle)
        }
        Template::Crossing => {
            let v = r.random_range(1.0..1.5);
            let ahead = r.random_range(12.0..20.0);
            agent(1, ego_at + ahead - v * cycle_seconds * focus as f64, -0.65 * LANE, 0.0, v, AgentClass::Pedestrian)
        }
        Template::Benign => {
            let side = if r.random_bool(0.5) { 1.0 } else { -1.0 };
            let v = r.random_range(5.0..12.0);
            agent(1, r.random_range(-20.0..80.0), side * r.random_range(15.0..30.0), 0.0, v, AgentClass::Vehicle)
        }
    }
}

fn scene(index: usize, seed: u64, spec: &SuiteSpec, template: Template, injection: Option<(usize, bool)>) -> Scenario<f64> {
    let mut r = rng::stream(seed, &[tag::SUITE, index as u64]);
    let duration = spec.cycles_per_scenario * spec.horizon;
    let cycle_seconds = spec.horizon as f64 * spec.dt;
    let focus = injection.map_or_else(|| r.random_range(0..spec.cycles_per_scenario), |(c, _)| c);
    let mut agents = vec![primary(template, focus, cycle_seconds, &mut r)];
    if r.random_bool(spec.neighbor_probability) {
        let v = r.random_range(5.5..7.0);
        agents.push(agent(2, r.random_range(5.0..40.0), -LANE, 0.0, v, AgentClass::Vehicle));
    }
    let ego = AgentState::new(Vec2::zero(), 0.0, EGO_SPEED, AgentClass::Vehicle);
    // The cost's target speed is 0.8 of the reference's average speed, so
    // the reference runs at 1.25× the ego speed to make 8 m/s the target.
    let reference_start = AgentState::new(Vec2::zero(), 0.0, EGO_SPEED / 0.8, AgentClass::Vehicle);
    let reference = Trajectory::rollout(0, spec.dt, reference_start, vec![ControlInput::zero(); duration + spec.horizon]);
    let goal = reference.states.last().expect("nonempty reference").position;
    let injections = injection
        .map(|(c, relevant)| AnomalyInjection {
            agent_id: AgentId(1),
            start_step: c * spec.horizon,
            injected_mode: template.injection(relevant),
            duration_steps: spec.horizon,
            task_relevant_flag: None,
        })
        .into_iter()
        .collect();
    Scenario {
        id: format!("s{seed}-{index:05}"),
        scene_type: template.name().to_string(),
        duration,
        dt: spec.dt,
        ego_init: ego,
        goal,
        reference_trajectory: reference,
        agents,
        static_obstacles: vec![],
        injections,
        seed: rng::derive_seed(seed, &[tag::SUITE, index as u64, 1]),
        truth_noise_scale: spec.truth_noise_scale,
    }
}

/// Builds a suite with `⌈cycles / cycles_per_scenario⌉` scenes. Exactly
/// `round(positive_rate · cycles)` of them carry a task-relevant injection
/// and `round(irrelevant_rate · cycles)` an irrelevant one.
pub fn generate_suite(spec: &SuiteSpec, seed: u64) -> Result<Vec<Scenario<f64>>> {
    if spec.cycles == 0 || spec.cycles_per_scenario == 0 || spec.horizon == 0 || !(spec.dt > 0.0) {
        return invalid("suite needs positive cycles, scene length, horizon and dt");
    }
    for rate in [spec.positive_rate, spec.irrelevant_rate] {
        if !(0.0..=1.0).contains(&rate) {
            return invalid("injection rates must lie in [0, 1]");
        }
    }
    if !(0.0..=1.0).contains(&spec.neighbor_probability) || spec.truth_noise_scale < 0.0 {
        return invalid("malformed neighbor probability or noise scale");
    }
    let scenes = spec.cycles.div_ceil(spec.cycles_per_scenario);
    let relevant = (spec.positive_rate * spec.cycles as f64).round() as usize;
    let irrelevant = (spec.irrelevant_rate * spec.cycles as f64).round() as usize;
    if relevant + irrelevant > scenes {
        return invalid(format!("{} injections do not fit in {scenes} scenes", relevant + irrelevant));
    }
    let mut r = rng::stream(seed, &[tag::SUITE]);
    let mut order: Vec<usize> = (0..scenes).collect();
    order.shuffle(&mut r);
    let mut plan: Vec<(Template, Option<(usize, bool)>)> = vec![(Template::Benign, None); scenes];
    for (k, idx) in order.iter().enumerate() {
        let inj = if k < relevant {
            Some(true)
        } else if k < relevant + irrelevant {
            Some(false)
        } else {
            None
        };
        let template = match inj {
            Some(_) => Template::ACTIVE[r.random_range(0..Template::ACTIVE.len())],
            None => {
                let all = [Template::Following, Template::CutIn, Template::Oncoming, Template::Crossing, Template::Benign];
                all[r.random_range(0..all.len())]
            }
        };
        plan[*idx] = (template, inj.map(|rel| (r.random_range(0..spec.cycles_per_scenario), rel)));
    }
    Ok(plan
        .into_iter()
        .enumerate()
        .map(|(i, (t, inj))| scene(i, seed, spec, t, inj))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rates_have_no_injections() {
        let spec = SuiteSpec { cycles: 100, positive_rate: 0.0, irrelevant_rate: 0.0, ..SuiteSpec::default() };
        let s = generate_suite(&spec, 3).unwrap();
        assert_eq!(s.len(), 20);
        assert!(s.iter().all(|x| x.injections.is_empty()));
        assert!(s.iter().all(|x| x.validate().is_ok()));
    }

    #[test]
    fn remark_rate_gives_seventy_positive_cycles() {
        let s = generate_suite(&SuiteSpec::default(), 1).unwrap();
        assert_eq!(s.len(), 400);
        let cycles: usize = s.iter().map(|x| x.duration / 4).sum();
        assert_eq!(cycles, 2000);
        let relevant = s
            .iter()
            .flat_map(|x| x.injections.iter().map(move |i| (x.scene_type.as_str(), i.injected_mode)))
            .filter(|(t, m)| Template::ACTIVE.iter().any(|k| k.name() == *t && k.injection(true) == *m))
            .count();
        let total: usize = s.iter().map(|x| x.injections.len()).sum();
        assert_eq!((relevant, total), (70, 140));
    }

    #[test]
    fn equal_seeds_equal_suites() {
        let spec = SuiteSpec { cycles: 200, ..SuiteSpec::default() };
        assert_eq!(generate_suite(&spec, 9).unwrap(), generate_suite(&spec, 9).unwrap());
        assert_ne!(generate_suite(&spec, 9).unwrap(), generate_suite(&spec, 10).unwrap());
    }

    #[test]
    fn overfull_rates_are_rejected() {
        let spec = SuiteSpec { cycles: 100, positive_rate: 0.2, irrelevant_rate: 0.1, ..SuiteSpec::default() };
        assert!(generate_suite(&spec, 0).is_err());
    }

    #[test]
    fn injections_are_outside_the_library() {
        for s in generate_suite(&SuiteSpec { cycles: 500, ..SuiteSpec::default() }, 4).unwrap() {
            for i in &s.injections {
                let a = s.agent(i.agent_id).unwrap();
                assert!(a.modes.iter().all(|m| m.label != i.injected_mode));
                assert_eq!(i.start_step % 4, 0);
            }
        }
    }
}
