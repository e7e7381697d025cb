//! Closed-loop simulation.
//!
//! Each planning cycle samples predictions once, plans against them, lets
//! the ego execute the whole primitive while the other agents follow their
//! scripts (with injections), then feeds the realized costs to every
//! detector and labels the cycle with the large-sample oracle.

mod engine;
mod suite;

pub(crate) use engine::unmonitored;
pub use engine::{
    label_cycle, run_scenario, run_suite, CycleRecord, CycleTiming, DetectorKind, DetectorScores,
    DetectorVerdicts, OracleLabel, MONITOR_FLOOR, ScenarioLog, SimConfig,
};
pub use suite::{generate_suite, SuiteSpec};
