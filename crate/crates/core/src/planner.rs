//! Motion-primitive tree planner.
//!
//! A primitive is a control sequence of length `T` whose first entry is the
//! previous control and whose remaining entries range over the Cartesian
//! product of the acceleration and turn-rate grids. Each primitive is rolled
//! out with the unicycle model and scored against the joint prediction
//! samples: sample `m` of the world pairs sample `m` of every agent. The
//! per-sample score is the (optionally discounted) sum of per-step total
//! costs; scores are then aggregated over samples.
//!
//! Rollouts share prefixes, so the search walks the tree depth-first and
//! evaluates each node once. The first branching level is scored in
//! parallel and merged by a deterministic reduction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{total_cost, CostModel, EgoFrame, EgoTerms, InteractionTerms, Interactor};
use crate::error::{invalid, Result};
use crate::model::{unicycle_step, AgentState, ControlInput, PredictionSet, Trajectory};
use crate::scalar::Scalar;

/// Statistic applied to the per-sample horizon costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Aggregation {
    Mean,
    Max,
    /// Mean of the worst `⌈alpha·M⌉` samples.
    Cvar { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig<S> {
    pub accelerations: Vec<S>,
    pub turn_rates: Vec<S>,
    pub horizon: usize,
    pub aggregation: Aggregation,
    /// Per-step discount `γ`; step `τ` is weighted by `γ^(τ−1)`.
    pub discount: S,
}

impl<S: Scalar> Default for PlannerConfig<S> {
    fn default() -> Self {
        Self {
            accelerations: [-2.0, 0.0, 1.0].map(S::lit).to_vec(),
            turn_rates: [-0.3, -0.1, 0.0, 0.1, 0.3].map(S::lit).to_vec(),
            horizon: 4,
            aggregation: Aggregation::Mean,
            discount: S::one(),
        }
    }
}

impl<S: Scalar> PlannerConfig<S> {
    pub fn validate(&self) -> Result<()> {
        if self.horizon < 2 {
            return invalid("planner horizon must be at least 2");
        }
        if self.accelerations.is_empty() || self.turn_rates.is_empty() {
            return invalid("control grids must be nonempty");
        }
        if !(self.discount > S::zero() && self.discount <= S::one()) {
            return invalid("discount must lie in (0, 1]");
        }
        if let Aggregation::Cvar { alpha } = self.aggregation {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return invalid("CVaR level must lie in (0, 1]");
            }
        }
        Ok(())
    }

    /// The control grid in enumeration order (acceleration-major).
    pub fn control_grid(&self) -> Vec<ControlInput<S>> {
        self.accelerations
            .iter()
            .flat_map(|a| self.turn_rates.iter().map(move |w| ControlInput::new(*a, *w)))
            .collect()
    }

    pub fn primitive_count(&self) -> usize {
        (self.accelerations.len() * self.turn_rates.len()).pow(self.horizon as u32 - 1)
    }
}

/// All control sequences in enumeration order. The first entry of every
/// sequence is `prev`; later entries are most-significant-first digits over
/// [`PlannerConfig::control_grid`].
pub fn enumerate_primitives<S: Scalar>(prev: ControlInput<S>, cfg: &PlannerConfig<S>) -> Vec<Vec<ControlInput<S>>> {
    let grid = cfg.control_grid();
    let mut out: Vec<Vec<ControlInput<S>>> = vec![vec![prev]];
    for _ in 1..cfg.horizon {
        out = out
            .into_iter()
            .flat_map(|seq| {
                grid.iter().map(move |u| {
                    let mut s = seq.clone();
                    s.push(*u);
                    s
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionPrimitive<S> {
    /// Position in the enumeration order.
    pub index: usize,
    pub controls: Vec<ControlInput<S>>,
    pub trajectory: Trajectory<S>,
    pub cost: S,
}

/// What a planning cycle is scored against.
#[derive(Debug, Clone, Copy)]
pub struct PlanContext<'a, S> {
    pub model: &'a CostModel<S>,
    /// Realized ego states ending with the current one; earlier entries feed
    /// the comfort term's finite differences.
    pub history: &'a [AgentState<S>],
    pub predictions: &'a [PredictionSet<S>],
    /// Wall-clock step of the current state.
    pub start_step: usize,
}

/// Predicted agents as interactors, laid out `[τ−1][agent][m]`.
struct SampleGrid<S> {
    m: usize,
    per_step: Vec<Vec<Vec<Interactor<S>>>>,
}

impl<'a, S: Scalar> PlanContext<'a, S> {
    fn current(&self) -> Result<&'a AgentState<S>> {
        match self.history.last() {
            Some(s) => Ok(s),
            None => invalid("ego history is empty"),
        }
    }

    fn sample_grid(&self, horizon: usize) -> Result<SampleGrid<S>> {
        let m = self.predictions.first().map_or(1, |p| p.len());
        for p in self.predictions {
            if p.len() != m || m == 0 {
                return invalid("every agent needs the same nonzero number of prediction samples");
            }
            if p.samples.iter().any(|t| t.states.len() <= horizon) {
                return invalid(format!("predictions for agent {} do not cover horizon {horizon}", p.agent_id));
            }
        }
        let params = &self.model.params;
        let per_step = (1..=horizon)
            .map(|tau| {
                self.predictions
                    .iter()
                    .map(|p| p.samples.iter().map(|t| params.interactor(&t.states[tau])).collect())
                    .collect()
            })
            .collect();
        Ok(SampleGrid { m, per_step })
    }
}

/// Per-sample cost of one ego state: interaction maxima over agents and
/// obstacles combined with the ego-only terms.
fn step_costs<S: Scalar>(model: &CostModel<S>, path: &[AgentState<S>], agents: &[Vec<Interactor<S>>], m: usize, out: &mut Vec<S>) {
    let ego = path.last().expect("nonempty path");
    let ego_terms: EgoTerms<S> = model.ego_terms(path);
    let frame = EgoFrame::new(ego, &model.params);
    let eps = model.params.eps_ttc;
    let mut base = InteractionTerms { ttc: S::zero(), d2a: S::zero() };
    for o in &model.obstacles {
        let t = frame.terms(o, eps);
        base.ttc = base.ttc.max(t.ttc);
        base.d2a = base.d2a.max(t.d2a);
    }
    out.clear();
    for k in 0..m {
        let mut i = base;
        for a in agents {
            let t = frame.terms(&a[k], eps);
            i.ttc = i.ttc.max(t.ttc);
            i.d2a = i.d2a.max(t.d2a);
        }
        let terms = [i.ttc, i.d2a, ego_terms.d2g, ego_terms.d2r, ego_terms.velocity, ego_terms.comfort, ego_terms.reverse];
        out.push(total_cost(&terms, &model.params.weights));
    }
}

/// Aggregates per-sample horizon sums into a primitive score.
pub fn aggregate<S: Scalar>(sums: &[S], how: Aggregation) -> S {
    match how {
        Aggregation::Mean => {
            let mut t = S::zero();
            for s in sums {
                t = t + *s;
            }
            t / S::lit(sums.len() as f64)
        }
        Aggregation::Max => sums.iter().copied().fold(S::neg_infinity(), S::max),
        Aggregation::Cvar { alpha } => {
            let mut v = sums.to_vec();
            v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
            let k = ((alpha * v.len() as f64).ceil() as usize).clamp(1, v.len());
            let mut t = S::zero();
            for s in &v[..k] {
                t = t + *s;
            }
            t / S::lit(k as f64)
        }
    }
}

/// Ego path for scoring: up to two realized states before the current one,
/// then the rollout.
fn scoring_path<S: Scalar>(history: &[AgentState<S>], cap: usize) -> Vec<AgentState<S>> {
    let keep = history.len().min(3);
    let mut v = Vec::with_capacity(keep + cap);
    v.extend_from_slice(&history[history.len() - keep..]);
    v
}

/// Rolls `controls` out from `start`.
pub fn rollout_primitive<S: Scalar>(start: &AgentState<S>, controls: &[ControlInput<S>], dt: S, start_time: usize) -> Trajectory<S> {
    Trajectory::rollout(start_time, dt, *start, controls.to_vec())
}

/// Score of one primitive, evaluated from scratch.
pub fn score_primitive<S: Scalar>(controls: &[ControlInput<S>], ctx: &PlanContext<'_, S>, cfg: &PlannerConfig<S>) -> Result<S> {
    let horizon = controls.len();
    let grid = ctx.sample_grid(horizon)?;
    let ego = ctx.current()?;
    let traj = rollout_primitive(ego, controls, ctx.model.dt, ctx.start_step);
    let mut path = scoring_path(ctx.history, horizon);
    let mut sums = vec![S::zero(); grid.m];
    let mut buf = Vec::with_capacity(grid.m);
    let mut weight = S::one();
    for tau in 1..=horizon {
        path.push(traj.states[tau]);
        step_costs(ctx.model, &path, &grid.per_step[tau - 1], grid.m, &mut buf);
        for (s, c) in sums.iter_mut().zip(&buf) {
            *s = *s + weight * *c;
        }
        weight = weight * cfg.discount;
    }
    Ok(aggregate(&sums, cfg.aggregation))
}

/// Selected primitive plus the per-agent interaction terms of every sample
/// along it, `[agent][τ−1][m]`. These are the exact numbers the planner
/// used, so detectors can reuse them without resampling.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan<S> {
    pub primitive: MotionPrimitive<S>,
    pub sample_terms: Vec<Vec<Vec<InteractionTerms<S>>>>,
}

struct Search<'a, S> {
    model: &'a CostModel<S>,
    cfg: &'a PlannerConfig<S>,
    grid: &'a SampleGrid<S>,
    controls: &'a [ControlInput<S>],
    dt: S,
}

impl<S: Scalar> Search<'_, S> {
    /// Best (score, index) in the subtree below the node at `depth` whose
    /// path and partial sums are given.
    fn descend(&self, depth: usize, index: usize, path: &mut Vec<AgentState<S>>, sums: &[S], weight: S) -> (S, usize) {
        let horizon = self.cfg.horizon;
        if depth == horizon {
            return (aggregate(sums, self.cfg.aggregation), index);
        }
        let mut best = (S::infinity(), usize::MAX);
        let mut buf = Vec::with_capacity(self.grid.m);
        let mut next = vec![S::zero(); sums.len()];
        for (k, u) in self.controls.iter().enumerate() {
            let cur = *path.last().expect("nonempty path");
            path.push(unicycle_step(&cur, u, self.dt));
            step_costs(self.model, path, &self.grid.per_step[depth], self.grid.m, &mut buf);
            for ((n, s), c) in next.iter_mut().zip(sums).zip(&buf) {
                *n = *s + weight * *c;
            }
            let cand = self.descend(depth + 1, index * self.controls.len() + k, path, &next, weight * self.cfg.discount);
            path.pop();
            if cand.0 < best.0 || best.1 == usize::MAX {
                best = cand;
            }
        }
        best
    }
}

/// Exhaustive search over every primitive. Ties resolve to the earliest
/// primitive in enumeration order.
pub fn plan<S: Scalar>(ctx: &PlanContext<'_, S>, prev_control: ControlInput<S>, cfg: &PlannerConfig<S>) -> Result<Plan<S>> {
    cfg.validate()?;
    let horizon = cfg.horizon;
    let grid = ctx.sample_grid(horizon)?;
    let ego = ctx.current()?;
    let controls = cfg.control_grid();
    let dt = ctx.model.dt;
    let search = Search { model: ctx.model, cfg, grid: &grid, controls: &controls, dt };

    // Depth 1 is pinned to the previous control.
    let mut root_path = scoring_path(ctx.history, horizon);
    root_path.push(unicycle_step(ego, &prev_control, dt));
    let mut buf = Vec::with_capacity(grid.m);
    step_costs(ctx.model, &root_path, &grid.per_step[0], grid.m, &mut buf);
    let root_sums = buf.clone();

    let branches: Vec<(S, usize)> = controls
        .par_iter()
        .enumerate()
        .map(|(k, u)| {
            let mut path = root_path.clone();
            let cur = *path.last().expect("nonempty path");
            path.push(unicycle_step(&cur, u, dt));
            let mut b = Vec::with_capacity(grid.m);
            step_costs(ctx.model, &path, &grid.per_step[1], grid.m, &mut b);
            let sums: Vec<S> = root_sums.iter().zip(&b).map(|(s, c)| *s + cfg.discount * *c).collect();
            search.descend(2, k, &mut path, &sums, cfg.discount * cfg.discount)
        })
        .collect();
    let (cost, index) = branches
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("control grid is nonempty");

    let mut seq = vec![prev_control];
    let mut rem = index;
    let mut digits = Vec::with_capacity(horizon - 1);
    for _ in 1..horizon {
        digits.push(rem % controls.len());
        rem /= controls.len();
    }
    seq.extend(digits.iter().rev().map(|d| controls[*d]));
    let trajectory = rollout_primitive(ego, &seq, dt, ctx.start_step);
    let sample_terms = interaction_samples(ctx, &trajectory, &grid);
    Ok(Plan {
        primitive: MotionPrimitive { index, controls: seq, trajectory, cost },
        sample_terms,
    })
}

fn interaction_samples<S: Scalar>(ctx: &PlanContext<'_, S>, traj: &Trajectory<S>, grid: &SampleGrid<S>) -> Vec<Vec<Vec<InteractionTerms<S>>>> {
    let params = &ctx.model.params;
    (0..ctx.predictions.len())
        .map(|a| {
            (1..traj.states.len())
                .map(|tau| {
                    let frame = EgoFrame::new(&traj.states[tau], params);
                    grid.per_step[tau - 1][a].iter().map(|o| frame.terms(o, params.eps_ttc)).collect()
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostParams;
    use crate::model::{AgentClass, AgentId, GaussianComponent, ManeuverLabel, ManeuverMode, Scenario, StepMixture, Vec2};
    use crate::predictor::sample_predictions;

    fn veh(x: f64, y: f64, h: f64, v: f64) -> AgentState<f64> {
        AgentState::new(Vec2::new(x, y), h, v, AgentClass::Vehicle)
    }

    /// Straight reference along +x at 8 m/s for 40 steps of 0.5 s.
    fn model() -> CostModel<f64> {
        let reference = Trajectory::rollout(0, 0.5, veh(0.0, 0.0, 0.0, 8.0), vec![ControlInput::zero(); 40]);
        let scenario = Scenario {
            id: "t".into(),
            scene_type: "generic".into(),
            duration: 40,
            dt: 0.5,
            ego_init: veh(0.0, 0.0, 0.0, 8.0),
            goal: Vec2::new(200.0, 0.0),
            reference_trajectory: reference,
            agents: vec![],
            static_obstacles: vec![],
            injections: vec![],
            seed: 0,
            truth_noise_scale: 1.0,
        };
        CostModel::for_scenario(&scenario, CostParams::default())
    }

    fn fixed_prediction(id: u32, states: Vec<AgentState<f64>>, m: usize) -> PredictionSet<f64> {
        let t = Trajectory::new(0, 0.5, states, None).unwrap();
        PredictionSet {
            agent_id: AgentId(id),
            horizon: t.horizon(),
            samples: vec![t; m],
            sample_modes: vec![0; m],
            mixture: vec![StepMixture { components: vec![GaussianComponent { weight: 1.0, mean: Vec2::zero(), cov: [[1.0, 0.0], [0.0, 1.0]] }] }],
        }
    }

    /// Independent exhaustive oracle: enumerate, roll out and score each
    /// primitive from scratch.
    fn oracle(ctx: &PlanContext<'_, f64>, prev: ControlInput<f64>, cfg: &PlannerConfig<f64>) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for (i, seq) in enumerate_primitives(prev, cfg).iter().enumerate() {
            let c = score_primitive(seq, ctx, cfg).unwrap();
            if c < best.1 {
                best = (i, c);
            }
        }
        best
    }

    #[test]
    fn primitive_counts() {
        let mut cfg = PlannerConfig::<f64>::default();
        cfg.horizon = 2;
        assert_eq!(enumerate_primitives(ControlInput::zero(), &cfg).len(), 15);
        cfg.horizon = 4;
        let prev = ControlInput::new(1.0, -0.1);
        let all = enumerate_primitives(prev, &cfg);
        assert_eq!(all.len(), 3375);
        assert_eq!(cfg.primitive_count(), 3375);
        assert!(all.iter().all(|s| s[0] == prev && s.len() == 4));
        assert_eq!(all[1][3], ControlInput::new(-2.0, -0.1));
        assert_eq!(all[15][2], ControlInput::new(-2.0, -0.1));
    }

    #[test]
    fn config_validation() {
        let mut cfg = PlannerConfig::<f64>::default();
        assert!(cfg.validate().is_ok());
        cfg.horizon = 1;
        assert!(cfg.validate().is_err());
        cfg.horizon = 4;
        cfg.discount = 0.0;
        assert!(cfg.validate().is_err());
        cfg.discount = 1.0;
        cfg.aggregation = Aggregation::Cvar { alpha: 0.0 };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn empty_scene_tracks_reference() {
        let m = model();
        let hist = [veh(-8.0, 0.0, 0.0, 8.0), veh(-4.0, 0.0, 0.0, 8.0), veh(0.0, 0.0, 0.0, 8.0)];
        let ctx = PlanContext { model: &m, history: &hist, predictions: &[], start_step: 0 };
        let cfg = PlannerConfig::default();
        let p = plan(&ctx, ControlInput::zero(), &cfg).unwrap();
        // Staying on the straight reference; acceleration is free inside the speed dead band.
        assert!(p.primitive.controls.iter().all(|u| u.turn_rate == 0.0), "{:?}", p.primitive.controls);
        assert!(p.primitive.trajectory.states.iter().all(|s| s.position.y == 0.0));
        let (i, c) = oracle(&ctx, ControlInput::zero(), &cfg);
        assert_eq!((p.primitive.index, p.primitive.cost), (i, c));
        assert!(p.sample_terms.is_empty());
    }

    #[test]
    fn offset_oncoming_car_turns_left_and_matches_oracle() {
        let m = model();
        let hist = [veh(0.0, 0.0, 0.0, 8.0)];
        // An oncoming car offset 1 m to the right: a small shift left clears it.
        let oncoming: Vec<_> = (0..=4).map(|k| veh(30.0 - 4.0 * k as f64, -1.0, std::f64::consts::PI, 8.0)).collect();
        let preds = vec![fixed_prediction(1, oncoming, 3)];
        let ctx = PlanContext { model: &m, history: &hist, predictions: &preds, start_step: 0 };
        let cfg = PlannerConfig::default();
        let p = plan(&ctx, ControlInput::zero(), &cfg).unwrap();
        let (i, c) = oracle(&ctx, ControlInput::zero(), &cfg);
        assert_eq!(p.primitive.index, i);
        assert_eq!(p.primitive.cost, c);
        let last = p.primitive.trajectory.states.last().unwrap();
        assert!(last.position.y > 0.0 && p.primitive.controls.iter().any(|u| u.turn_rate > 0.0), "{:?}", p.primitive.controls);
    }

    #[test]
    fn identical_samples_equal_single_sample() {
        let m = model();
        let hist = [veh(0.0, 0.0, 0.0, 8.0)];
        let path: Vec<_> = (0..=4).map(|k| veh(30.0 - 3.0 * k as f64, 1.0, std::f64::consts::PI, 6.0)).collect();
        let many = vec![fixed_prediction(1, path.clone(), 7)];
        let one = vec![fixed_prediction(1, path, 1)];
        let cfg = PlannerConfig::default();
        let seq = enumerate_primitives(ControlInput::zero(), &cfg)[100].clone();
        let a = score_primitive(&seq, &PlanContext { model: &m, history: &hist, predictions: &many, start_step: 0 }, &cfg).unwrap();
        let b = score_primitive(&seq, &PlanContext { model: &m, history: &hist, predictions: &one, start_step: 0 }, &cfg).unwrap();
        assert!((a - b).abs() <= 1e-12 * b.abs());
    }

    #[test]
    fn doubling_weights_doubles_scores() {
        let mut m = model();
        let hist = [veh(0.0, 0.0, 0.0, 8.0)];
        let modes = [ManeuverMode::standard(ManeuverLabel::ConstantVelocity, AgentClass::Vehicle, 1.0, 0.5, 0.1)];
        let preds = vec![sample_predictions(AgentId(1), &veh(25.0, 2.0, 3.0, 5.0), &modes, 20, 4, 0.5, 0, 4).unwrap()];
        let cfg = PlannerConfig::default();
        let seqs = enumerate_primitives(ControlInput::zero(), &cfg);
        let before: Vec<f64> = seqs.iter().step_by(97).map(|s| score_primitive(s, &PlanContext { model: &m, history: &hist, predictions: &preds, start_step: 0 }, &cfg).unwrap()).collect();
        for w in m.params.weights.iter_mut() {
            *w *= 2.0;
        }
        let after: Vec<f64> = seqs.iter().step_by(97).map(|s| score_primitive(s, &PlanContext { model: &m, history: &hist, predictions: &preds, start_step: 0 }, &cfg).unwrap()).collect();
        for (b, a) in before.iter().zip(&after) {
            assert!((a - 2.0 * b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn aggregations() {
        let v = [1.0, 4.0, 2.0, 3.0];
        assert_eq!(aggregate(&v, Aggregation::Mean), 2.5);
        assert_eq!(aggregate(&v, Aggregation::Max), 4.0);
        assert_eq!(aggregate(&v, Aggregation::Cvar { alpha: 0.5 }), 3.5);
        assert_eq!(aggregate(&v, Aggregation::Cvar { alpha: 1.0 }), 2.5);
    }

    #[test]
    fn other_aggregations_match_oracle() {
        let m = model();
        let hist = [veh(0.0, 0.0, 0.0, 8.0)];
        let modes = [
            ManeuverMode::standard(ManeuverLabel::ConstantVelocity, AgentClass::Vehicle, 0.6, 0.5, 0.1),
            ManeuverMode::standard(ManeuverLabel::TurnRight, AgentClass::Vehicle, 0.4, 0.5, 0.1),
        ];
        let preds = vec![sample_predictions(AgentId(1), &veh(18.0, 4.0, 0.0, 3.0), &modes, 10, 4, 0.5, 0, 11).unwrap()];
        let ctx = PlanContext { model: &m, history: &hist, predictions: &preds, start_step: 0 };
        for agg in [Aggregation::Max, Aggregation::Cvar { alpha: 0.3 }] {
            let cfg = PlannerConfig { aggregation: agg, discount: 0.9, ..PlannerConfig::default() };
            let p = plan(&ctx, ControlInput::new(0.0, 0.1), &cfg).unwrap();
            let (i, c) = oracle(&ctx, ControlInput::new(0.0, 0.1), &cfg);
            assert_eq!((p.primitive.index, p.primitive.cost), (i, c));
        }
    }

    #[test]
    fn sample_terms_reproduce_plan_cost() {
        let m = model();
        let hist = [veh(-4.0, 0.0, 0.0, 8.0), veh(0.0, 0.0, 0.0, 8.0)];
        let modes = [ManeuverMode::standard(ManeuverLabel::Brake, AgentClass::Vehicle, 1.0, 0.5, 0.1)];
        let preds = vec![
            sample_predictions(AgentId(1), &veh(20.0, 0.5, 0.0, 6.0), &modes, 8, 4, 0.5, 0, 1).unwrap(),
            sample_predictions(AgentId(2), &veh(25.0, -3.0, 0.2, 6.0), &modes, 8, 4, 0.5, 0, 2).unwrap(),
        ];
        let ctx = PlanContext { model: &m, history: &hist, predictions: &preds, start_step: 0 };
        let cfg = PlannerConfig::default();
        let p = plan(&ctx, ControlInput::zero(), &cfg).unwrap();
        let mut path = hist.to_vec();
        let mut sums = vec![0.0; 8];
        for tau in 1..=4 {
            path.push(p.primitive.trajectory.states[tau]);
            let e = m.ego_terms(&path);
            for (k, s) in sums.iter_mut().enumerate() {
                let ttc = p.sample_terms.iter().map(|a| a[tau - 1][k].ttc).fold(0.0, f64::max);
                let d2a = p.sample_terms.iter().map(|a| a[tau - 1][k].d2a).fold(0.0, f64::max);
                *s += total_cost(&[ttc, d2a, e.d2g, e.d2r, e.velocity, e.comfort, e.reverse], &m.params.weights);
            }
        }
        assert_eq!(aggregate(&sums, Aggregation::Mean), p.primitive.cost);
    }

    #[test]
    fn horizon_mismatch_is_rejected() {
        let m = model();
        let hist = [veh(0.0, 0.0, 0.0, 8.0)];
        let short = vec![fixed_prediction(1, vec![veh(10.0, 0.0, 0.0, 1.0); 3], 2)];
        let ctx = PlanContext { model: &m, history: &hist, predictions: &short, start_step: 0 };
        assert!(plan(&ctx, ControlInput::zero(), &PlannerConfig::default()).is_err());
        let uneven = vec![fixed_prediction(1, vec![veh(10.0, 0.0, 0.0, 1.0); 5], 2), fixed_prediction(2, vec![veh(10.0, 5.0, 0.0, 1.0); 5], 3)];
        let ctx = PlanContext { model: &m, history: &hist, predictions: &uneven, start_step: 0 };
        assert!(plan(&ctx, ControlInput::zero(), &PlannerConfig::default()).is_err());
    }
}
