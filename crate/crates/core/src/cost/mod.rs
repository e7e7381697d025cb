//! Planning cost: seven weighted terms, the two-term proxy cost and
//! time-to-collision geometry.
//!
//! Interaction terms (`ttc`, `d2a`) are maxima over the other agents; the
//! remaining five depend on the ego alone. Within one planning step the
//! ego-only part is common to every prediction sample, which the planner
//! and the detector both exploit.
//!
//! Note on `d2a`: the exponent multiplies squared position and squared
//! velocity differences, so an agent moving with the ego's exact velocity
//! scores 1 at any distance. The formula is implemented as is.

mod terms;
mod ttc;

pub use terms::{
    cost_comfort, cost_d2g, cost_d2r, cost_reverse, cost_velocity, EgoDerivatives, ReferencePath,
    ReferenceSpeed,
};
pub use ttc::{time_to_collision, ttc_relative};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AgentClass, AgentState, Circle, Scenario, Vec2};
use crate::scalar::Scalar;

/// Term scales and weights. Defaults are the standard constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostParams<S> {
    pub eps_ttc: S,
    pub eps_rbf_vehicle: S,
    pub eps_rbf_pedestrian: S,
    /// (a∥, a⊥, j∥, |j|, θ̇, θ̈) comfort limits.
    pub comfort_eps: [S; 6],
    /// Weights for (ttc, d2a, d2g, d2r, velocity, comfort, reverse).
    pub weights: [S; 7],
    pub radius_vehicle: S,
    pub radius_pedestrian: S,
}

impl<S: Scalar> Default for CostParams<S> {
    fn default() -> Self {
        let l = S::lit;
        Self {
            eps_ttc: l(3.0),
            eps_rbf_vehicle: l(0.5),
            eps_rbf_pedestrian: l(1.0),
            comfort_eps: [l(2.4), l(4.89), l(4.13), l(8.37), l(0.95), l(1.93)],
            weights: [l(1.0), l(10.0), l(1.0), l(1.0), l(1.0), l(0.5), l(10.0)],
            radius_vehicle: l(1.0),
            radius_pedestrian: l(0.2),
        }
    }
}

impl<S: Scalar> CostParams<S> {
    pub fn validate(&self) -> Result<()> {
        let eps_ok = [self.eps_ttc, self.eps_rbf_vehicle, self.eps_rbf_pedestrian]
            .iter()
            .chain(self.comfort_eps.iter())
            .all(|e| *e > S::zero());
        if !eps_ok {
            return Err(Error::InvalidArgument("cost scales must be positive".into()));
        }
        if self.weights.iter().any(|w| *w < S::zero()) {
            return Err(Error::InvalidArgument("cost weights must be nonnegative".into()));
        }
        if !(self.radius_vehicle > S::zero() && self.radius_pedestrian > S::zero()) {
            return Err(Error::InvalidArgument("radii must be positive".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn radius(&self, class: AgentClass) -> S {
        match class {
            AgentClass::Vehicle => self.radius_vehicle,
            AgentClass::Pedestrian => self.radius_pedestrian,
        }
    }

    pub fn rbf(&self, class: AgentClass) -> S {
        match class {
            AgentClass::Vehicle => self.eps_rbf_vehicle,
            AgentClass::Pedestrian => self.eps_rbf_pedestrian,
        }
    }

    pub fn interactor(&self, s: &AgentState<S>) -> Interactor<S> {
        Interactor {
            position: s.position,
            velocity: s.velocity(),
            radius: self.radius(s.agent_class),
            rbf_eps: self.rbf(s.agent_class),
        }
    }

    /// Static obstacles interact like stopped vehicles of their own radius.
    pub fn obstacle(&self, c: &Circle<S>) -> Interactor<S> {
        Interactor {
            position: c.center,
            velocity: Vec2::zero(),
            radius: c.radius,
            rbf_eps: self.eps_rbf_vehicle,
        }
    }
}

/// What the interaction terms need to know about another agent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interactor<S> {
    pub position: Vec2<S>,
    pub velocity: Vec2<S>,
    pub radius: S,
    pub rbf_eps: S,
}

/// Unweighted interaction terms against a single agent.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InteractionTerms<S> {
    pub ttc: S,
    pub d2a: S,
}

/// Ego quantities shared by every interaction evaluated at one ego state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EgoFrame<S> {
    pub position: Vec2<S>,
    pub velocity: Vec2<S>,
    pub heading: Vec2<S>,
    pub radius: S,
}

impl<S: Scalar> EgoFrame<S> {
    pub fn new(ego: &AgentState<S>, params: &CostParams<S>) -> Self {
        Self {
            position: ego.position,
            velocity: ego.velocity(),
            heading: Vec2::from_angle(ego.heading),
            radius: params.radius(ego.agent_class),
        }
    }

    /// `1 − min(ttc/ε, 1)` and the momentum-shaped distance for one agent.
    #[inline]
    pub fn terms(&self, other: &Interactor<S>, eps_ttc: S) -> InteractionTerms<S> {
        let dx = other.position - self.position;
        let dv = other.velocity - self.velocity;
        let t = ttc_relative(dx, dv, self.radius + other.radius);
        let ttc = S::one() - (t / eps_ttc).min(S::one());

        let h = self.heading;
        let n = h.perp();
        let (xp, xn) = (dx.dot(h), dx.dot(n));
        let (vp, vn) = (dv.dot(h), dv.dot(n));
        let e = xp * xp * vp * vp + xn * xn * vn * vn;
        let d2a = (S::lit(-0.5) * other.rbf_eps * e).exp();
        InteractionTerms { ttc, d2a }
    }
}

/// Interaction terms of the ego against a single agent.
#[inline]
pub fn interaction_terms<S: Scalar>(ego: &AgentState<S>, other: &Interactor<S>, params: &CostParams<S>) -> InteractionTerms<S> {
    EgoFrame::new(ego, params).terms(other, params.eps_ttc)
}

/// Max over agents of `1 − min(ttc/ε_ttc, 1)`; 0 with no agents.
pub fn cost_ttc<S: Scalar>(ego: &AgentState<S>, agents: &[Interactor<S>], params: &CostParams<S>) -> S {
    agents
        .iter()
        .map(|a| interaction_terms(ego, a, params).ttc)
        .fold(S::zero(), S::max)
}

/// Max over agents of the momentum-shaped distance; 0 with no agents.
pub fn cost_d2a<S: Scalar>(ego: &AgentState<S>, agents: &[Interactor<S>], params: &CostParams<S>) -> S {
    agents
        .iter()
        .map(|a| interaction_terms(ego, a, params).d2a)
        .fold(S::zero(), S::max)
}

/// `Σ wᵢ·cᵢ` in term order.
#[inline]
pub fn total_cost<S: Scalar>(terms: &[S; 7], weights: &[S; 7]) -> S {
    let mut t = S::zero();
    for i in 0..7 {
        t = t + weights[i] * terms[i];
    }
    t
}

/// `w₁·c_ttc + w₂·c_d2a`.
pub fn proxy_cost<S: Scalar>(ego: &AgentState<S>, agents: &[Interactor<S>], params: &CostParams<S>) -> S {
    params.weights[0] * cost_ttc(ego, agents, params) + params.weights[1] * cost_d2a(ego, agents, params)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EgoTerms<S> {
    pub d2g: S,
    pub d2r: S,
    pub velocity: S,
    pub comfort: S,
    pub reverse: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown<S> {
    pub ttc: S,
    pub d2a: S,
    pub d2g: S,
    pub d2r: S,
    pub velocity: S,
    pub comfort: S,
    pub reverse: S,
    pub total: S,
}

impl<S: Scalar> CostBreakdown<S> {
    pub fn new(ttc: S, d2a: S, ego: &EgoTerms<S>, weights: &[S; 7]) -> Self {
        let terms = [ttc, d2a, ego.d2g, ego.d2r, ego.velocity, ego.comfort, ego.reverse];
        Self {
            ttc,
            d2a,
            d2g: ego.d2g,
            d2r: ego.d2r,
            velocity: ego.velocity,
            comfort: ego.comfort,
            reverse: ego.reverse,
            total: total_cost(&terms, weights),
        }
    }

    pub fn terms(&self) -> [S; 7] {
        [self.ttc, self.d2a, self.d2g, self.d2r, self.velocity, self.comfort, self.reverse]
    }
}

/// Cost function bound to one scene: parameters plus goal, start and
/// reference path.
#[derive(Debug, Clone)]
pub struct CostModel<S> {
    pub params: CostParams<S>,
    pub goal: Vec2<S>,
    pub ego_start: Vec2<S>,
    pub reference: ReferencePath<S>,
    pub speed: ReferenceSpeed<S>,
    pub dt: S,
    pub obstacles: Vec<Interactor<S>>,
}

impl<S: Scalar> CostModel<S> {
    pub fn for_scenario(scenario: &Scenario<S>, params: CostParams<S>) -> Self {
        let r = &scenario.reference_trajectory;
        let obstacles = scenario.static_obstacles.iter().map(|c| params.obstacle(c)).collect();
        Self {
            goal: scenario.goal,
            ego_start: scenario.ego_init.position,
            reference: ReferencePath::from_trajectory(r),
            speed: ReferenceSpeed::new(scenario.goal, scenario.ego_init.position, r.duration()),
            dt: scenario.dt,
            obstacles,
            params,
        }
    }

    /// Ego-only terms; `history` ends with the evaluated state.
    pub fn ego_terms(&self, history: &[AgentState<S>]) -> EgoTerms<S> {
        let ego = history.last().expect("nonempty ego history");
        let d = EgoDerivatives::from_history(history, self.dt);
        EgoTerms {
            d2g: cost_d2g(ego.position, self.goal, self.ego_start),
            d2r: cost_d2r(ego, &self.reference),
            velocity: cost_velocity(ego.speed, &self.speed),
            comfort: cost_comfort(&d, &self.params.comfort_eps),
            reverse: cost_reverse(ego),
        }
    }

    /// Max-combined interaction terms over `agents` and the static obstacles.
    pub fn interaction_max(&self, ego: &AgentState<S>, agents: &[Interactor<S>]) -> InteractionTerms<S> {
        let mut m = InteractionTerms { ttc: S::zero(), d2a: S::zero() };
        for a in agents.iter().chain(self.obstacles.iter()) {
            let t = interaction_terms(ego, a, &self.params);
            m.ttc = m.ttc.max(t.ttc);
            m.d2a = m.d2a.max(t.d2a);
        }
        m
    }

    /// Full seven-term cost of the last state in `history`.
    pub fn breakdown(&self, history: &[AgentState<S>], agents: &[Interactor<S>]) -> CostBreakdown<S> {
        let ego = history.last().expect("nonempty ego history");
        let i = self.interaction_max(ego, agents);
        CostBreakdown::new(i.ttc, i.d2a, &self.ego_terms(history), &self.params.weights)
    }

    /// Weighted interaction cost attributable to a single agent.
    #[inline]
    pub fn agent_cost(&self, t: InteractionTerms<S>) -> S {
        self.params.weights[0] * t.ttc + self.params.weights[1] * t.d2a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn veh(x: f64, y: f64, h: f64, v: f64) -> AgentState<f64> {
        AgentState::new(Vec2::new(x, y), h, v, AgentClass::Vehicle)
    }

    fn p() -> CostParams<f64> {
        CostParams::default()
    }

    #[test]
    fn default_constants() {
        let d = p();
        assert_eq!(d.weights, [1.0, 10.0, 1.0, 1.0, 1.0, 0.5, 10.0]);
        assert_eq!(d.eps_ttc, 3.0);
        assert_eq!((d.eps_rbf_vehicle, d.eps_rbf_pedestrian), (0.5, 1.0));
        assert_eq!(d.comfort_eps, [2.4, 4.89, 4.13, 8.37, 0.95, 1.93]);
        assert_eq!((d.radius_vehicle, d.radius_pedestrian), (1.0, 0.2));
        assert!(d.validate().is_ok());
    }

    #[test]
    fn params_load_from_json_with_defaults() {
        let q = CostParams::<f64>::from_json(r#"{"eps_ttc": 4.0}"#).unwrap();
        assert_eq!(q.eps_ttc, 4.0);
        assert_eq!(q.weights, p().weights);
        assert!(CostParams::<f64>::from_json(r#"{"eps_ttc": 0.0}"#).is_err());
        assert!(CostParams::<f64>::from_json(r#"{"weights": [1,1,1,1,1,1,-1]}"#).is_err());
    }

    #[test]
    fn ttc_cost_examples() {
        let params = p();
        let ego = veh(0.0, 0.0, 0.0, 2.5);
        let head_on = params.interactor(&veh(10.0, 0.0, PI, 2.5));
        assert!((cost_ttc(&ego, &[head_on], &params) - (1.0 - 1.6 / 3.0)).abs() < 1e-12);
        let away = params.interactor(&veh(10.0, 0.0, 0.0, 9.0));
        assert_eq!(cost_ttc(&ego, &[away], &params), 0.0);
        let touching = params.interactor(&veh(1.0, 0.0, 0.0, 0.0));
        assert_eq!(cost_ttc(&ego, &[touching], &params), 1.0);
        assert_eq!(cost_ttc(&ego, &[], &params), 0.0);
    }

    #[test]
    fn d2a_examples() {
        let params = p();
        let ego = veh(0.0, 0.0, 0.0, 5.0);
        let same_velocity = params.interactor(&veh(40.0, 7.0, 0.0, 5.0));
        assert_eq!(cost_d2a(&ego, &[same_velocity], &params), 1.0);
        let colocated = params.interactor(&veh(0.0, 0.0, 1.0, 3.0));
        assert_eq!(cost_d2a(&ego, &[colocated], &params), 1.0);
        let ahead = params.interactor(&veh(2.0, 0.0, 0.0, 6.0));
        assert!((cost_d2a(&ego, &[ahead], &params) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(cost_d2a(&ego, &[], &params), 0.0);
    }

    #[test]
    fn total_examples() {
        let w = p().weights;
        assert_eq!(total_cost(&[0.0; 7], &w), 0.0);
        assert_eq!(total_cost(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0], &w), 10.0);
        assert_eq!(total_cost(&[0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0], &w), 10.5);
    }

    #[test]
    fn proxy_examples() {
        let params = p();
        let ego = veh(0.0, 0.0, 0.0, 5.0);
        let far_away = params.interactor(&veh(200.0, 50.0, 0.5, 20.0));
        assert_eq!(proxy_cost(&ego, &[far_away], &params), 0.0);
        let colocated = params.interactor(&veh(0.0, 0.0, 2.0, 1.0));
        assert!(proxy_cost(&ego, &[colocated], &params) >= 10.0);
    }

    #[test]
    fn pedestrian_uses_own_radius_and_scale() {
        let params = p();
        let ego = veh(0.0, 0.0, 0.0, 0.0);
        let ped = AgentState::new(Vec2::new(1.1, 0.0), 0.0, 0.0, AgentClass::Pedestrian);
        let i = params.interactor(&ped);
        assert_eq!((i.radius, i.rbf_eps), (0.2, 1.0));
        assert_eq!(interaction_terms(&ego, &i, &params).ttc, 1.0);
    }

    fn arb_state() -> impl Strategy<Value = AgentState<f64>> {
        (-40.0f64..40.0, -40.0f64..40.0, -PI..PI, -5.0f64..20.0, any::<bool>()).prop_map(|(x, y, h, v, ped)| {
            let class = if ped { AgentClass::Pedestrian } else { AgentClass::Vehicle };
            AgentState::new(Vec2::new(x, y), h, v, class)
        })
    }

    proptest! {
        #[test]
        fn term_ranges_and_monotonicity(ego in arb_state(), others in prop::collection::vec(arb_state(), 0..6), extra in arb_state()) {
            let params = p();
            let mut agents: Vec<_> = others.iter().map(|s| params.interactor(s)).collect();
            let ttc = cost_ttc(&ego, &agents, &params);
            let d2a = cost_d2a(&ego, &agents, &params);
            prop_assert!((0.0..=1.0).contains(&ttc));
            prop_assert!((0.0..=1.0).contains(&d2a));
            agents.push(params.interactor(&extra));
            prop_assert!(cost_ttc(&ego, &agents, &params) >= ttc);
            prop_assert!(cost_d2a(&ego, &agents, &params) >= d2a);
        }

        #[test]
        fn total_is_dot_product(terms in prop::array::uniform7(0.0f64..5.0), weights in prop::array::uniform7(0.0f64..20.0)) {
            let t = total_cost(&terms, &weights);
            let dot: f64 = terms.iter().zip(&weights).map(|(a, b)| a * b).sum();
            prop_assert!((t - dot).abs() <= 1e-12 * (1.0 + dot.abs()));
        }

        #[test]
        fn ego_terms_nonnegative(h in prop::collection::vec(arb_state(), 1..4)) {
            let params = p();
            let reference = crate::model::Trajectory::rollout(0, 0.5, AgentState::new(Vec2::zero(), 0.0, 8.0, AgentClass::Vehicle), vec![crate::model::ControlInput::zero(); 20]);
            let r = ReferencePath::from_trajectory(&reference);
            let spd = ReferenceSpeed::new(Vec2::new(80.0, 0.0), Vec2::zero(), 10.0);
            let ego = h.last().unwrap();
            prop_assert!(cost_d2g(ego.position, Vec2::new(80.0, 0.0), Vec2::zero()) >= 0.0);
            prop_assert!(cost_d2r(ego, &r) >= 0.0);
            prop_assert!(cost_velocity(ego.speed, &spd) >= 0.0);
            let rev = cost_reverse(ego);
            prop_assert!(rev == 0.0 || rev == 1.0);
            let d = EgoDerivatives::from_history(&h, 0.5);
            prop_assert!(cost_comfort(&d, &params.comfort_eps) >= 0.0);
        }
    }
}
