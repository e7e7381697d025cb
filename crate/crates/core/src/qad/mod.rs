//! The p-quantile anomaly detector.
//!
//! Given M i.i.d. predicted costs sorted as `ĉ¹ ≤ … ≤ ĉᴹ`, the detector
//! fires when the observed cost reaches the `(M − n)`-th order statistic.
//! Because each sample independently lands in the top-p tail with
//! probability p, the number of samples above the true `(1 − p)` quantile is
//! `Bin(M, p)`, which yields closed-form bounds on both error rates and a
//! calibration of `n` that needs no labeled data.

mod bounds;
mod detector;
mod oracle;

pub use bounds::{binomial_tails, calibrate, fnr_bound, fpr_bound, CalibrationTarget};
pub use detector::{detect_step, qad_run, qad_run_with, rank_count, AgentCostStream, CostSampleSet};
pub use oracle::{empirical_quantile, quantile_from_samples, quantile_oracle, QuantileOracleResult};
