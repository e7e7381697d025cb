use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{likelihood_score, min_ttc, pdt_score, reach_min_gap, udt_score, window_threshold_count, ReachConfig, LIKELIHOOD_GATE_RADIUS};
use crate::cost::{CostBreakdown, CostModel, CostParams, EgoFrame, InteractionTerms};
use crate::error::{invalid, Error, Result};
use crate::model::{agent_step, AgentId, AgentState, ControlInput, DetectionEvent, ManeuverLabel, PredictionSet, Scenario, ScriptedAgent};
use crate::planner::{plan, PlanContext, PlannerConfig};
use crate::predictor::{perturbed_control, sample_predictions, sample_trajectory};
use crate::qad::{calibrate, qad_run_with, quantile_from_samples, rank_count, AgentCostStream, CalibrationTarget, CostSampleSet};
use crate::rng::{self, tag};

/// Agents farther than this from the origin count as having left the
/// numeric range of the scene (m).
const STATE_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    Qad,
    Likelihood,
    Udt,
    Pdt,
    Ttc,
    Reach,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 6] = [
        DetectorKind::Qad,
        DetectorKind::Likelihood,
        DetectorKind::Udt,
        DetectorKind::Pdt,
        DetectorKind::Ttc,
        DetectorKind::Reach,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::Qad => "qad",
            DetectorKind::Likelihood => "likelihood",
            DetectorKind::Udt => "udt",
            DetectorKind::Pdt => "pdt",
            DetectorKind::Ttc => "ttc",
            DetectorKind::Reach => "reach",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown detector {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Prediction samples per agent and cycle.
    pub m: usize,
    /// Quantile level of the anomaly definition.
    pub p: f64,
    /// Target level used to calibrate the two QAD operating points.
    pub alpha: f64,
    pub planner: PlannerConfig<f64>,
    pub cost: CostParams<f64>,
    pub detectors: Vec<DetectorKind>,
    /// Log-density below which the likelihood baseline fires.
    pub likelihood_log_threshold: f64,
    pub likelihood_gate: f64,
    /// p-value of the UDT/PDT verdicts.
    pub degradation_p: f64,
    pub ttc_threshold: f64,
    pub reach: ReachConfig,
    /// Fresh samples drawn by the labeling oracle.
    pub oracle_samples: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            m: 100,
            p: 0.05,
            alpha: 0.05,
            planner: PlannerConfig::default(),
            cost: CostParams::default(),
            detectors: DetectorKind::ALL.to_vec(),
            likelihood_log_threshold: -10.0,
            likelihood_gate: LIKELIHOOD_GATE_RADIUS,
            degradation_p: 0.05,
            ttc_threshold: 1.0,
            reach: ReachConfig::default(),
            oracle_samples: 100_000,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return invalid("need at least two prediction samples");
        }
        if !(self.p > 0.0 && self.p < 1.0 && self.alpha > 0.0 && self.alpha < 1.0) {
            return invalid("p and alpha must lie in (0, 1)");
        }
        if !(self.degradation_p > 0.0 && self.degradation_p < 1.0) {
            return invalid("degradation p-value must lie in (0, 1)");
        }
        if self.oracle_samples == 0 {
            return invalid("oracle needs at least one sample");
        }
        self.planner.validate()?;
        self.cost.validate()?;
        self.reach.validate()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    fn wants(&self, d: DetectorKind) -> bool {
        self.detectors.contains(&d)
    }

    /// Rank offsets `(n_fpr, n_fnr)` from data-free calibration.
    pub fn qad_offsets(&self) -> Result<(usize, usize)> {
        Ok((
            calibrate(self.m, self.p, CalibrationTarget::BoundFpr, self.alpha)?,
            calibrate(self.m, self.p, CalibrationTarget::BoundFnr, self.alpha)?,
        ))
    }
}

/// Optional scores that may be infinite. JSON has no infinities, so they
/// travel as the strings `"inf"` and `"-inf"`.
mod extended {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) if x.is_infinite() => Repr::Str(if *x > 0.0 { "inf" } else { "-inf" }.into()).serialize(s),
            Some(x) => Repr::Num(*x).serialize(s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            None => Ok(None),
            Some(Repr::Num(x)) => Ok(Some(x)),
            Some(Repr::Str(t)) => match t.as_str() {
                "inf" => Ok(Some(f64::INFINITY)),
                "-inf" => Ok(Some(f64::NEG_INFINITY)),
                _ => Err(serde::de::Error::custom(format!("bad score {t:?}"))),
            },
        }
    }
}

/// Anomaly scores, larger meaning more anomalous. `None` when the detector
/// was not run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectorScores {
    /// Largest fraction of samples at or below the observed cost over
    /// monitored `(agent, step)` pairs; 0 if nothing was monitored.
    #[serde(default, with = "extended")]
    pub qad: Option<f64>,
    /// Largest negative log-density over gated `(agent, step)` pairs.
    #[serde(default, with = "extended")]
    pub likelihood: Option<f64>,
    #[serde(default, with = "extended")]
    pub udt: Option<f64>,
    #[serde(default, with = "extended")]
    pub pdt: Option<f64>,
    /// Negated minimum time to collision over the executed steps.
    #[serde(default, with = "extended")]
    pub ttc: Option<f64>,
    /// Negated minimum sampled gap to the committed plan.
    #[serde(default, with = "extended")]
    pub reach: Option<f64>,
}

impl DetectorScores {
    pub fn get(&self, d: DetectorKind) -> Option<f64> {
        match d {
            DetectorKind::Qad => self.qad,
            DetectorKind::Likelihood => self.likelihood,
            DetectorKind::Udt => self.udt,
            DetectorKind::Pdt => self.pdt,
            DetectorKind::Ttc => self.ttc,
            DetectorKind::Reach => self.reach,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectorVerdicts {
    pub qad_fpr: Option<bool>,
    pub qad_fnr: Option<bool>,
    pub likelihood: Option<bool>,
    pub udt: Option<bool>,
    pub pdt: Option<bool>,
    pub ttc: Option<bool>,
    pub reach: Option<bool>,
}

impl DetectorVerdicts {
    /// `(name, verdict)` pairs for the detectors that ran.
    pub fn named(&self) -> Vec<(&'static str, bool)> {
        [
            ("qad_fpr", self.qad_fpr),
            ("qad_fnr", self.qad_fnr),
            ("likelihood", self.likelihood),
            ("udt", self.udt),
            ("pdt", self.pdt),
            ("ttc", self.ttc),
            ("reach", self.reach),
        ]
        .into_iter()
        .filter_map(|(n, v)| v.map(|v| (n, v)))
        .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleLabel {
    pub agent_id: AgentId,
    /// Largest observed monitored cost over the cycle.
    pub observed: f64,
    /// Fraction of fresh samples at or below `observed`.
    pub quantile: f64,
    pub threshold: f64,
    pub anomaly: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub scenario_id: String,
    pub scene_type: String,
    pub cycle: usize,
    pub start_step: usize,
    pub label: bool,
    pub injection_active: bool,
    /// Agent whose injection was active during the cycle, if any.
    pub injected_agent: Option<AgentId>,
    pub injected_mode: Option<ManeuverLabel>,
    pub oracle: Option<OracleLabel>,
    pub scores: DetectorScores,
    pub verdicts: DetectorVerdicts,
    /// First event of the FPR-calibrated QAD.
    pub qad_event: Option<DetectionEvent<f64>>,
    /// Realized cost at the cycle's starting state.
    pub observed_cost: CostBreakdown<f64>,
    pub plan_cost: f64,
    pub plan_index: usize,
    pub ego: AgentState<f64>,
}

/// Wall-clock timings; kept out of the serialized log so logs are
/// reproducible byte for byte.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CycleTiming {
    pub plan_seconds: f64,
    pub qad_seconds: f64,
    pub monitored_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioLog {
    pub scenario_id: String,
    pub records: Vec<CycleRecord>,
    pub timings: Vec<CycleTiming>,
}

/// Predicted and observed monitored costs of one cycle, `[agent][τ−1]`.
struct CycleCosts {
    streams: Vec<AgentCostStream<f64>>,
    /// Unsorted predicted costs `[agent][τ−1][m]`, sample order.
    predicted: Vec<Vec<Vec<f64>>>,
    observed: Vec<Vec<f64>>,
}

fn cycle_costs(model: &CostModel<f64>, ids: &[AgentId], sample_terms: &[Vec<Vec<InteractionTerms<f64>>>], ego: &[AgentState<f64>], realized: &[Vec<AgentState<f64>>], start: usize) -> Result<CycleCosts> {
    let predicted: Vec<Vec<Vec<f64>>> = sample_terms
        .iter()
        .map(|agent| agent.iter().map(|step| step.iter().map(|t| model.agent_cost(*t)).collect()).collect())
        .collect();
    let streams = ids
        .iter()
        .zip(&predicted)
        .map(|(id, steps)| {
            Ok(AgentCostStream {
                agent_id: *id,
                sets: steps
                    .iter()
                    .enumerate()
                    .map(|(k, v)| CostSampleSet::from_unsorted(start + k + 1, v.clone()))
                    .collect::<Result<_>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let observed = realized
        .iter()
        .map(|states| {
            states
                .iter()
                .zip(ego)
                .map(|(a, e)| {
                    let frame = EgoFrame::new(e, &model.params);
                    model.agent_cost(frame.terms(&model.params.interactor(a), model.params.eps_ttc))
                })
                .collect()
        })
        .collect();
    Ok(CycleCosts { streams, predicted, observed })
}

/// Observed per-agent costs below this carry no interaction and are not
/// monitored. The momentum-shaped distance decays like `exp(−x²)` but only
/// reaches zero on underflow, so without a floor a remote agent's `1e-200`
/// would outrank samples that underflowed to exactly zero.
pub const MONITOR_FLOOR: f64 = 1e-3;

pub(crate) fn unmonitored(c: f64) -> bool {
    c < MONITOR_FLOOR
}

fn qad_score(costs: &CycleCosts) -> (f64, usize) {
    let mut best = 0.0f64;
    let mut pairs = 0;
    for (s, o) in costs.streams.iter().zip(&costs.observed) {
        for (set, c) in s.sets.iter().zip(o) {
            if unmonitored(*c) {
                continue;
            }
            pairs += 1;
            best = best.max(rank_count(*c, set) as f64 / set.len() as f64);
        }
    }
    (best, pairs)
}

/// Oracle label for one cycle: fresh predictions for the injected agent,
/// scored against the executed ego states, compared with the realized
/// maximum monitored cost.
pub fn label_cycle(
    scenario: &Scenario<f64>,
    model: &CostModel<f64>,
    agent: &ScriptedAgent<f64>,
    agent_start: &AgentState<f64>,
    ego: &[AgentState<f64>],
    observed: &[f64],
    cycle: usize,
    cfg: &SimConfig,
) -> OracleLabel {
    let z_obs = observed.iter().copied().fold(0.0, f64::max);
    let frames: Vec<EgoFrame<f64>> = ego.iter().map(|e| EgoFrame::new(e, &model.params)).collect();
    let horizon = ego.len();
    let mut zs: Vec<f64> = (0..cfg.oracle_samples)
        .map(|i| {
            let mut r = rng::stream(scenario.seed, &[tag::ORACLE, cycle as u64, agent.id.0 as u64, i as u64]);
            let (t, _) = sample_trajectory(agent_start, &agent.modes, horizon, scenario.dt, 0, &mut r);
            frames
                .iter()
                .zip(&t.states[1..])
                .map(|(f, s)| model.agent_cost(f.terms(&model.params.interactor(s), model.params.eps_ttc)))
                .fold(0.0, f64::max)
        })
        .collect();
    let r = quantile_from_samples(z_obs, &mut zs, cfg.p);
    OracleLabel {
        agent_id: agent.id,
        observed: z_obs,
        quantile: r.quantile,
        threshold: r.threshold,
        anomaly: r.anomaly && !unmonitored(z_obs),
    }
}

fn check_state(s: &AgentState<f64>, step: usize, who: &str) -> Result<()> {
    if !s.is_finite() || s.position.norm() > STATE_LIMIT || s.speed.abs() > STATE_LIMIT {
        return Err(Error::ScenarioFault {
            step,
            message: format!("{who} left the numeric range: {s:?}"),
        });
    }
    Ok(())
}

/// One scripted step for `agent` from `state` at wall step `step`.
pub(crate) fn script_step(scenario: &Scenario<f64>, agent: &ScriptedAgent<f64>, state: &AgentState<f64>, step: usize) -> AgentState<f64> {
    let mode = agent.mode_for(scenario.executed_label(agent, step));
    let mut r = rng::stream(scenario.seed, &[tag::TRUTH, agent.id.0 as u64, step as u64]);
    let u = if scenario.truth_noise_scale > 0.0 {
        perturbed_control(&mode, scenario.truth_noise_scale, &mut r)
    } else {
        mode.control
    };
    agent_step(state, &u, scenario.dt)
}

/// Predictions for every agent at the start of `cycle`.
pub(crate) fn predict_all(scenario: &Scenario<f64>, agents: &[AgentState<f64>], m: usize, horizon: usize, cycle: usize, step: usize) -> Result<Vec<PredictionSet<f64>>> {
    scenario
        .agents
        .iter()
        .zip(agents)
        .map(|(a, s)| {
            let seed = rng::derive_seed(scenario.seed, &[tag::PREDICT, cycle as u64, a.id.0 as u64]);
            sample_predictions(a.id, s, &a.modes, m, horizon, scenario.dt, step, seed)
        })
        .collect()
}

/// Runs one scenario in closed loop, re-planning every `T` steps.
pub fn run_scenario(scenario: &Scenario<f64>, cfg: &SimConfig) -> Result<ScenarioLog> {
    scenario.validate()?;
    cfg.validate()?;
    let (n_fpr, n_fnr) = cfg.qad_offsets()?;
    let model = CostModel::for_scenario(scenario, cfg.cost.clone());
    let horizon = cfg.planner.horizon;
    let ids: Vec<AgentId> = scenario.agents.iter().map(|a| a.id).collect();
    let mut history = vec![scenario.ego_init];
    let mut agents: Vec<AgentState<f64>> = scenario.agents.iter().map(|a| a.init).collect();
    let mut prev_control = ControlInput::zero();
    let mut log = ScenarioLog { scenario_id: scenario.id.clone(), ..Default::default() };

    let mut step = 0;
    let mut cycle = 0;
    while step + horizon <= scenario.duration {
        let t0 = Instant::now();
        let preds = predict_all(scenario, &agents, cfg.m, horizon, cycle, step)?;
        let keep = history.len().saturating_sub(3);
        let ctx = PlanContext { model: &model, history: &history[keep..], predictions: &preds, start_step: step };
        let observed_cost = model.breakdown(&history[keep..], &agents.iter().map(|a| model.params.interactor(a)).collect::<Vec<_>>());
        let chosen = plan(&ctx, prev_control, &cfg.planner)?;
        let plan_seconds = t0.elapsed().as_secs_f64();

        let ego: Vec<AgentState<f64>> = chosen.primitive.trajectory.states[1..].to_vec();
        for (k, e) in ego.iter().enumerate() {
            check_state(e, step + k + 1, "ego")?;
        }
        let mut realized: Vec<Vec<AgentState<f64>>> = Vec::with_capacity(agents.len());
        for (a, s) in scenario.agents.iter().zip(&agents) {
            let mut cur = *s;
            let mut path = Vec::with_capacity(horizon);
            for k in 0..horizon {
                cur = script_step(scenario, a, &cur, step + k);
                check_state(&cur, step + k + 1, &format!("agent {}", a.id))?;
                path.push(cur);
            }
            realized.push(path);
        }

        let t1 = Instant::now();
        let costs = cycle_costs(&model, &ids, &chosen.sample_terms, &ego, &realized, step)?;
        let (qad, pairs) = qad_score(&costs);
        let qad_event = qad_run_with(&costs.streams, &costs.observed, n_fpr, step, "qad", |_, _, c| unmonitored(c))?;
        let qad_seconds = t1.elapsed().as_secs_f64();

        let mut scores = DetectorScores::default();
        let mut verdicts = DetectorVerdicts::default();
        let m = cfg.m as f64;
        if cfg.wants(DetectorKind::Qad) {
            scores.qad = Some(qad);
            verdicts.qad_fpr = Some(qad_event.is_some());
            verdicts.qad_fnr = Some(qad * m >= (cfg.m - n_fnr) as f64);
        }
        if cfg.wants(DetectorKind::Likelihood) {
            let s = likelihood_score(&preds, &realized, &ego, cfg.likelihood_gate);
            scores.likelihood = Some(s);
            verdicts.likelihood = Some(s > -cfg.likelihood_log_threshold);
        }
        let reference = |a: usize| -> Vec<Vec<f64>> { (0..cfg.m).map(|k| costs.predicted[a].iter().map(|step| step[k]).collect()).collect() };
        if cfg.wants(DetectorKind::Udt) || cfg.wants(DetectorKind::Pdt) {
            let (mut udt, mut pdt) = (0.0f64, 0.0f64);
            for a in 0..ids.len() {
                let r = reference(a);
                udt = udt.max(udt_score(&r, &costs.observed[a])?);
                pdt = pdt.max(pdt_score(&r, &costs.observed[a])?);
            }
            if cfg.wants(DetectorKind::Udt) {
                scores.udt = Some(udt);
                verdicts.udt = Some(udt * m >= window_threshold_count(cfg.m, cfg.degradation_p) as f64);
            }
            if cfg.wants(DetectorKind::Pdt) {
                scores.pdt = Some(pdt);
                verdicts.pdt = Some(pdt * m >= window_threshold_count(cfg.m, cfg.degradation_p / horizon as f64) as f64);
            }
        }
        if cfg.wants(DetectorKind::Ttc) {
            let t = (0..horizon)
                .map(|k| {
                    let others: Vec<AgentState<f64>> = realized.iter().map(|r| r[k]).collect();
                    min_ttc(&ego[k], &others)
                })
                .fold(f64::INFINITY, f64::min);
            scores.ttc = Some(-t);
            verdicts.ttc = Some(t < cfg.ttc_threshold);
        }
        if cfg.wants(DetectorKind::Reach) {
            let mut gap = f64::INFINITY;
            for (a, s) in scenario.agents.iter().zip(&agents) {
                let seed = rng::derive_seed(scenario.seed, &[cycle as u64, a.id.0 as u64]);
                gap = gap.min(reach_min_gap(&chosen.primitive.trajectory, s, &cfg.reach, seed)?);
            }
            scores.reach = Some(-gap);
            verdicts.reach = Some(gap < 0.0);
        }

        let injection = scenario.injections.iter().find(|i| i.overlaps(step, horizon));
        let injected = injection.map(|i| i.agent_id);
        let oracle = match injected {
            Some(id) => {
                let idx = ids.iter().position(|x| *x == id).expect("validated injection target");
                Some(label_cycle(scenario, &model, &scenario.agents[idx], &agents[idx], &ego, &costs.observed[idx], cycle, cfg))
            }
            None => None,
        };

        log.records.push(CycleRecord {
            scenario_id: scenario.id.clone(),
            scene_type: scenario.scene_type.clone(),
            cycle,
            start_step: step,
            label: oracle.is_some_and(|o| o.anomaly),
            injection_active: injected.is_some(),
            injected_agent: injected,
            injected_mode: injection.map(|i| i.injected_mode),
            oracle,
            scores,
            verdicts,
            qad_event,
            observed_cost,
            plan_cost: chosen.primitive.cost,
            plan_index: chosen.primitive.index,
            ego: history[history.len() - 1],
        });
        log.timings.push(CycleTiming { plan_seconds, qad_seconds, monitored_pairs: pairs });

        prev_control = *chosen.primitive.controls.last().expect("nonempty primitive");
        history.extend_from_slice(&ego);
        for (a, r) in agents.iter_mut().zip(&realized) {
            *a = *r.last().expect("nonempty realized path");
        }
        step += horizon;
        cycle += 1;
    }
    Ok(log)
}

/// Runs scenarios on `workers` threads (0 = available parallelism). The
/// returned logs are ordered by scenario id.
pub fn run_suite(scenarios: &[Scenario<f64>], cfg: &SimConfig, workers: usize) -> Result<Vec<ScenarioLog>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let mut logs = pool.install(|| scenarios.par_iter().map(|s| run_scenario(s, cfg)).collect::<Result<Vec<_>>>())?;
    logs.sort_by(|a, b| a.scenario_id.cmp(&b.scenario_id));
    Ok(logs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{generate_suite, SuiteSpec};

    #[test]
    fn monitored_sets_reuse_the_planner_samples() {
        let spec = SuiteSpec { cycles: 10, positive_rate: 0.0, irrelevant_rate: 0.0, ..SuiteSpec::default() };
        let cfg = SimConfig { m: 40, ..SimConfig::default() };
        for scenario in generate_suite(&spec, 4).unwrap() {
            let model = CostModel::for_scenario(&scenario, cfg.cost.clone());
            let agents: Vec<AgentState<f64>> = scenario.agents.iter().map(|a| a.init).collect();
            let horizon = cfg.planner.horizon;
            let preds = predict_all(&scenario, &agents, cfg.m, horizon, 0, 0).unwrap();
            let history = [scenario.ego_init];
            let ctx = PlanContext { model: &model, history: &history, predictions: &preds, start_step: 0 };
            let chosen = plan(&ctx, ControlInput::zero(), &cfg.planner).unwrap();
            let ego = &chosen.primitive.trajectory.states[1..];
            let ids: Vec<AgentId> = scenario.agents.iter().map(|a| a.id).collect();
            let realized: Vec<Vec<AgentState<f64>>> = agents.iter().map(|a| vec![*a; horizon]).collect();
            let costs = cycle_costs(&model, &ids, &chosen.sample_terms, ego, &realized, 0).unwrap();
            for (a, stream) in costs.streams.iter().enumerate() {
                for (k, set) in stream.sets.iter().enumerate() {
                    let frame = EgoFrame::new(&ego[k], &model.params);
                    let mut direct: Vec<f64> = preds[a]
                        .samples
                        .iter()
                        .map(|t| model.agent_cost(frame.terms(&model.params.interactor(&t.states[k + 1]), model.params.eps_ttc)))
                        .collect();
                    direct.sort_by(f64::total_cmp);
                    assert_eq!(set.samples(), direct.as_slice());
                    assert_eq!(set.len(), cfg.m);
                }
            }
        }
    }
}
