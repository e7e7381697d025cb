//! Quantile-based anomaly detection for sampling-based motion planners.
//!
//! The crate bundles a small 2-D driving world (unicycle agents, scripted
//! behavior, anomaly injections), a synthetic multi-modal predictor, a
//! weighted planning cost, a motion-primitive planner that evaluates its plan
//! against predicted samples, the rank-threshold detector that reuses those
//! samples, several baseline detectors, a closed-loop simulator and the
//! evaluation code that compares them.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the simulator
//! and evaluation run in `f64`. Type aliases for the common instantiations
//! are exported at the crate root.

pub mod baselines;
pub mod bench;
pub mod cost;
pub mod error;
pub mod eval;
pub mod model;
pub mod planner;
pub mod predictor;
pub mod qad;
pub mod rng;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use cost::{CostModel, CostParams};
pub use model::{AgentState, ControlInput, PredictionSet, Scenario, Trajectory, Vec2};
pub use planner::{Aggregation, PlannerConfig};
pub use qad::{calibrate, detect_step, CalibrationTarget, CostSampleSet};
pub use sim::{run_scenario, run_suite, SimConfig};

pub type Vec2f64 = model::Vec2<f64>;
pub type Vec2f32 = model::Vec2<f32>;
pub type AgentState64 = model::AgentState<f64>;
pub type AgentState32 = model::AgentState<f32>;
pub type Trajectory64 = model::Trajectory<f64>;
pub type Trajectory32 = model::Trajectory<f32>;
pub type Scenario64 = model::Scenario<f64>;
pub type CostParams64 = cost::CostParams<f64>;
pub type CostParams32 = cost::CostParams<f32>;
pub type CostSampleSet64 = qad::CostSampleSet<f64>;
pub type CostSampleSet32 = qad::CostSampleSet<f32>;
pub type PlannerConfig64 = planner::PlannerConfig<f64>;
