//! ROC analysis, empirical error rates and the adaptive re-planning study.

mod rates;
mod replan;
mod roc;

pub use rates::{empirical_rates, wilson_interval, RateEstimate, Rates};
pub use replan::{adaptive_replan, adaptive_replan_study, interval_cdf, replan_scenarios, ReplanArm, ReplanConfig, ReplanRun, ReplanSummary};
pub use roc::{auroc_pairwise, best_point, roc, BestPoint, RocCurve, RocPoint};
