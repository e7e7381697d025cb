//! Adaptive re-planning study.
//!
//! The ego commits to a long plan (it tracks the scene's reference path)
//! and re-plans only when the detector fires, or when the plan runs out.
//! Each re-plan draws fresh predictions for every agent along the whole
//! plan; every executed step compares each agent's observed cost with the
//! matching sample set. The time between re-plans is the quantity of
//! interest: anomalies that matter to the plan should shorten it, and a
//! quiet scene should leave it near the full plan length.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{CostModel, CostParams, EgoFrame};
use crate::error::{invalid, Result};
use crate::model::{
    agent_step, AgentClass, AgentId, AgentState, AnomalyInjection, ControlInput, ManeuverLabel, ManeuverMode,
    ModeSegment, Scenario, ScriptedAgent, Trajectory, Vec2,
};
use crate::predictor::{perturbed_control, sample_trajectory};
use crate::qad::{calibrate, detect_step, CalibrationTarget, CostSampleSet};
use crate::rng::{self, tag};
use crate::sim::unmonitored;

const LANE: f64 = 3.5;
const EGO_SPEED: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReplanConfig {
    pub m: usize,
    pub p: f64,
    /// Target of the FPR calibration that fixes `n`.
    pub alpha: f64,
    /// Plan length in steps.
    pub long_horizon: usize,
    pub runs_per_arm: usize,
    /// Fraction of injection slots that carry an injection, one arm each.
    pub injection_rates: Vec<f64>,
    /// Steps per scene.
    pub duration: usize,
    pub dt: f64,
    /// Length of one injection slot in steps.
    pub injection_steps: usize,
    /// Factor on the predictor's mode noise relative to the scene library.
    /// With noiseless truth the library noise already makes the prediction
    /// wider than reality.
    pub noise_widening: f64,
    pub truth_noise_scale: f64,
    pub cost: CostParams<f64>,
}

impl Default for ReplanConfig {
    fn default() -> Self {
        Self {
            m: 100,
            p: 0.25,
            alpha: 0.05,
            long_horizon: 20,
            runs_per_arm: 100,
            injection_rates: vec![0.0, 0.035, 0.2],
            duration: 200,
            dt: 0.5,
            injection_steps: 4,
            noise_widening: 1.0,
            truth_noise_scale: 0.0,
            cost: CostParams::default(),
        }
    }
}

impl ReplanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 || self.long_horizon == 0 || self.runs_per_arm == 0 || self.injection_steps == 0 {
            return invalid("replan study needs M ≥ 2 and positive horizon, runs and slot length");
        }
        if self.duration < self.long_horizon {
            return invalid("scene shorter than one plan");
        }
        if !(self.p > 0.0 && self.p < 1.0 && self.alpha > 0.0 && self.alpha < 1.0) {
            return invalid("p and alpha must lie in (0, 1)");
        }
        if self.injection_rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return invalid("injection rates must lie in [0, 1]");
        }
        if !(self.dt > 0.0 && self.noise_widening > 0.0 && self.truth_noise_scale >= 0.0) {
            return invalid("dt and noise widening must be positive");
        }
        self.cost.validate()
    }

    /// Rank offset of the detector.
    pub fn offset(&self) -> Result<usize> {
        calibrate(self.m, self.p, CalibrationTarget::BoundFpr, self.alpha)
    }
}

/// Intervals of one scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplanRun {
    pub scenario_id: String,
    pub scene_type: String,
    pub injection_rate: f64,
    /// Steps between consecutive plans, ending either at a detection or at
    /// the end of the plan.
    pub intervals: Vec<usize>,
    /// Steps of a last plan cut short by the end of the scene.
    pub censored: Option<usize>,
    pub detections: usize,
}

impl ReplanRun {
    pub fn mean_interval(&self) -> Option<f64> {
        (!self.intervals.is_empty()).then(|| self.intervals.iter().sum::<usize>() as f64 / self.intervals.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplanSummary {
    pub injection_rate: f64,
    pub runs: usize,
    /// Mean over runs of each run's mean interval (steps).
    pub mean_interval: f64,
    /// Standard error of `mean_interval`.
    pub std_error: f64,
    pub detections: usize,
    /// Mean interval per scene type, pooled over that type's intervals.
    pub by_scene: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplanArm {
    pub summary: ReplanSummary,
    pub runs: Vec<ReplanRun>,
}

impl ReplanArm {
    pub fn intervals(&self) -> Vec<usize> {
        self.runs.iter().flat_map(|r| r.intervals.iter().copied()).collect()
    }
}

fn library(class: AgentClass) -> Vec<ManeuverMode<f64>> {
    let (sa, sw) = match class {
        AgentClass::Vehicle => (0.4, 0.03),
        AgentClass::Pedestrian => (0.2, 0.15),
    };
    [(ManeuverLabel::ConstantVelocity, 0.9), (ManeuverLabel::Brake, 0.05), (ManeuverLabel::Accelerate, 0.05)]
        .into_iter()
        .map(|(l, w)| ManeuverMode::standard(l, class, w, sa, sw))
        .collect()
}

/// An agent moving toward the ego (heading π).
fn scripted(id: u32, x: f64, y: f64, speed: f64, class: AgentClass) -> ScriptedAgent<f64> {
    ScriptedAgent {
        id: AgentId(id),
        init: AgentState::new(Vec2::new(x, y), PI, speed, class),
        modes: library(class),
        schedule: vec![ModeSegment { start_step: 0, label: ManeuverLabel::ConstantVelocity }],
    }
}

const SCENES: [&str; 3] = ["oncoming", "pedestrians", "mixed"];

/// Nominal position of an agent after `step` steps of constant velocity.
fn nominal_x(a: &ScriptedAgent<f64>, step: usize, dt: f64) -> f64 {
    a.init.position.x + a.init.heading.cos() * a.init.speed * dt * step as f64
}

/// How far from the ideal lead distance an agent `ahead` meters in front of
/// the ego is, if eligible at all. Turned toward the lane at the ideal
/// distance, the agent crosses it roughly as the ego arrives.
fn lead_mismatch(class: AgentClass, ahead: f64) -> Option<f64> {
    let (lo, ideal, hi) = match class {
        AgentClass::Vehicle => (18.0, 32.0, 55.0),
        AgentClass::Pedestrian => (16.0, 24.0, 35.0),
    };
    (lo..hi).contains(&ahead).then(|| (ahead - ideal).abs())
}

/// Scenes of one arm. Oncoming cars use the left lane and pedestrians walk
/// toward the ego on the right sidewalk; the ego drives at 8 m/s between
/// them. An injection turns the agent nearest ahead of the ego toward the
/// ego's lane.
pub fn replan_scenarios(rate: f64, cfg: &ReplanConfig, seed: u64) -> Result<Vec<Scenario<f64>>> {
    cfg.validate()?;
    let span = EGO_SPEED * cfg.dt * cfg.duration as f64;
    (0..cfg.runs_per_arm)
        .map(|i| {
            let mut r = rng::stream(seed, &[tag::REPLAN, rate.to_bits(), i as u64]);
            let scene_type = SCENES[i % SCENES.len()];
            let mut agents = Vec::new();
            let mut id = 1;
            if scene_type != "pedestrians" {
                let spacing = if scene_type == "mixed" { 90.0 } else { 60.0 };
                let mut x = r.random_range(30.0..60.0);
                while x < 2.5 * span {
                    agents.push(scripted(id, x, LANE, r.random_range(6.0..8.0), AgentClass::Vehicle));
                    id += 1;
                    x += spacing * r.random_range(0.8..1.2);
                }
            }
            if scene_type != "oncoming" {
                let spacing = if scene_type == "mixed" { 60.0 } else { 35.0 };
                let mut x = r.random_range(20.0..40.0);
                while x < 1.3 * span {
                    agents.push(scripted(id, x, -LANE, r.random_range(1.0..1.6), AgentClass::Pedestrian));
                    id += 1;
                    x += spacing * r.random_range(0.8..1.2);
                }
            }
            let slots = cfg.duration / cfg.injection_steps;
            let mut injections = Vec::new();
            for k in 0..slots {
                if !r.random_bool(rate) {
                    continue;
                }
                let start = k * cfg.injection_steps;
                let ego_x = EGO_SPEED * cfg.dt * start as f64;
                let target = agents
                    .iter()
                    .filter_map(|a| lead_mismatch(a.init.agent_class, nominal_x(a, start, cfg.dt) - ego_x).map(|d| (a, d)))
                    .min_by(|a, b| a.1.total_cmp(&b.1));
                if let Some((a, _)) = target {
                    // Both walk or drive toward the ego; the car's left and
                    // the pedestrian's right point into the ego's lane.
                    let injected_mode = match a.init.agent_class {
                        AgentClass::Vehicle => ManeuverLabel::TurnLeft,
                        AgentClass::Pedestrian => ManeuverLabel::TurnRight,
                    };
                    injections.push(AnomalyInjection {
                        agent_id: a.id,
                        start_step: start,
                        injected_mode,
                        duration_steps: cfg.injection_steps,
                        task_relevant_flag: None,
                    });
                }
            }
            let ego = AgentState::new(Vec2::zero(), 0.0, EGO_SPEED, AgentClass::Vehicle);
            let reference = Trajectory::rollout(0, cfg.dt, ego, vec![ControlInput::zero(); cfg.duration]);
            let s = Scenario {
                id: format!("r{seed}-{:03}-{i:03}", (rate * 1000.0).round() as u64),
                scene_type: scene_type.to_string(),
                duration: cfg.duration,
                dt: cfg.dt,
                ego_init: ego,
                goal: reference.states.last().expect("nonempty reference").position,
                reference_trajectory: reference,
                agents,
                static_obstacles: vec![],
                injections,
                seed: rng::derive_seed(seed, &[tag::REPLAN, rate.to_bits(), i as u64, 1]),
                truth_noise_scale: cfg.truth_noise_scale,
            };
            s.validate()?;
            Ok(s)
        })
        .collect()
}

/// Runs one scene with detector-triggered re-planning.
pub fn adaptive_replan(scenario: &Scenario<f64>, rate: f64, cfg: &ReplanConfig) -> Result<ReplanRun> {
    let n = cfg.offset()?;
    let model = CostModel::for_scenario(scenario, cfg.cost);
    let ego_path = &scenario.reference_trajectory.states;
    let wide: Vec<Vec<ManeuverMode<f64>>> = scenario
        .agents
        .iter()
        .map(|a| {
            a.modes
                .iter()
                .map(|m| ManeuverMode { accel_std: m.accel_std * cfg.noise_widening, turn_std: m.turn_std * cfg.noise_widening, ..*m })
                .collect()
        })
        .collect();
    let mut agents: Vec<AgentState<f64>> = scenario.agents.iter().map(|a| a.init).collect();
    let mut run = ReplanRun {
        scenario_id: scenario.id.clone(),
        scene_type: scenario.scene_type.clone(),
        injection_rate: rate,
        intervals: Vec::new(),
        censored: None,
        detections: 0,
    };
    let mut step = 0;
    let mut plan_index = 0u64;
    while step < scenario.duration {
        let frames: Vec<EgoFrame<f64>> = (1..=cfg.long_horizon)
            .map(|k| EgoFrame::new(&ego_path[(step + k).min(ego_path.len() - 1)], &model.params))
            .collect();
        // sets[a][k−1]: predicted costs of agent a at plan step k
        let sets: Vec<Vec<CostSampleSet<f64>>> = agents
            .iter()
            .zip(&wide)
            .enumerate()
            .map(|(a, (s, modes))| {
                let mut costs = vec![Vec::with_capacity(cfg.m); cfg.long_horizon];
                for i in 0..cfg.m {
                    let mut r = rng::stream(scenario.seed, &[tag::PREDICT, plan_index, a as u64, i as u64]);
                    let (t, _) = sample_trajectory(s, modes, cfg.long_horizon, scenario.dt, step, &mut r);
                    for (k, (f, x)) in frames.iter().zip(&t.states[1..]).enumerate() {
                        costs[k].push(model.agent_cost(f.terms(&model.params.interactor(x), model.params.eps_ttc)));
                    }
                }
                costs.into_iter().enumerate().map(|(k, c)| CostSampleSet::from_unsorted(step + k + 1, c)).collect()
            })
            .collect::<Result<_>>()?;

        let mut fired = None;
        let mut k = 0;
        while k < cfg.long_horizon && step + k < scenario.duration {
            let t = step + k;
            for (a, s) in scenario.agents.iter().zip(agents.iter_mut()) {
                let mode = a.mode_for(scenario.executed_label(a, t));
                let u = if scenario.truth_noise_scale > 0.0 {
                    let mut r = rng::stream(scenario.seed, &[tag::TRUTH, a.id.0 as u64, t as u64]);
                    perturbed_control(&mode, scenario.truth_noise_scale, &mut r)
                } else {
                    mode.control
                };
                *s = agent_step(s, &u, scenario.dt);
            }
            k += 1;
            let frame = &frames[k - 1];
            for (s, set) in agents.iter().zip(&sets) {
                let c = model.agent_cost(frame.terms(&model.params.interactor(s), model.params.eps_ttc));
                if !unmonitored(c) && detect_step(c, &set[k - 1], n)? {
                    fired = Some(k);
                }
            }
            if fired.is_some() {
                break;
            }
        }
        match fired {
            Some(k) => {
                run.detections += 1;
                run.intervals.push(k);
            }
            None if k == cfg.long_horizon => run.intervals.push(k),
            None => run.censored = Some(k),
        }
        step += k;
        plan_index += 1;
    }
    Ok(run)
}

fn summarize(rate: f64, runs: &[ReplanRun]) -> ReplanSummary {
    let means: Vec<f64> = runs.iter().filter_map(ReplanRun::mean_interval).collect();
    let n = means.len() as f64;
    let mean = means.iter().sum::<f64>() / n;
    let var = if means.len() > 1 { means.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    let mut pooled: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for r in runs {
        let e = pooled.entry(r.scene_type.clone()).or_default();
        e.0 += r.intervals.iter().sum::<usize>();
        e.1 += r.intervals.len();
    }
    ReplanSummary {
        injection_rate: rate,
        runs: runs.len(),
        mean_interval: mean,
        std_error: (var / n).sqrt(),
        detections: runs.iter().map(|r| r.detections).sum(),
        by_scene: pooled.into_iter().filter(|(_, (_, c))| *c > 0).map(|(k, (s, c))| (k, s as f64 / c as f64)).collect(),
    }
}

/// One arm per injection rate, each over `runs_per_arm` seeded scenes.
pub fn adaptive_replan_study(cfg: &ReplanConfig, seed: u64) -> Result<Vec<ReplanArm>> {
    cfg.validate()?;
    cfg.injection_rates
        .iter()
        .map(|&rate| {
            let scenes = replan_scenarios(rate, cfg, seed)?;
            let runs = scenes.par_iter().map(|s| adaptive_replan(s, rate, cfg)).collect::<Result<Vec<_>>>()?;
            Ok(ReplanArm { summary: summarize(rate, &runs), runs })
        })
        .collect()
}

/// Empirical CDF of intervals at `1..=horizon`.
pub fn interval_cdf(intervals: &[usize], horizon: usize) -> Vec<(usize, f64)> {
    let n = intervals.len().max(1) as f64;
    (1..=horizon).map(|h| (h, intervals.iter().filter(|&&i| i <= h).count() as f64 / n)).collect()
}
