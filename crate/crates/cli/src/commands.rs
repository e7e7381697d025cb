use std::fs;
use std::path::Path;

use log::info;
use qad_core::baselines::{ensemble_log, EnsembleMode};
use qad_core::bench::detection_latency;
use qad_core::eval::{adaptive_replan_study, best_point, empirical_rates, interval_cdf, roc, RocCurve};
use qad_core::qad::{fnr_bound, fpr_bound, quantile_oracle, CostSampleSet};
use qad_core::rng;
use qad_core::sim::{generate_suite, run_suite, CycleRecord, DetectorKind, SuiteSpec};
use qad_core::{calibrate, detect_step, CalibrationTarget, Error, Result, Scenario};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::CliConfig;
use crate::output::{read_records, write_csv, write_jsonl, write_log_csv};
use crate::svg::roc_svg;
use crate::{Cli, Command, OracleCheck, Target};

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = CliConfig::load(cli.config.as_deref())?;
    fs::create_dir_all(&cli.out_dir)?;
    let out = cli.out_dir.as_path();
    match &cli.command {
        Command::Generate { cycles, positive_rate } => {
            let mut spec = cfg.suite.clone();
            if let Some(c) = cycles {
                spec.cycles = *c;
            }
            if let Some(r) = positive_rate {
                spec.positive_rate = *r;
            }
            let suite = generate_suite(&spec, cli.seed)?;
            fs::write(out.join("suite.json"), serde_json::to_string_pretty(&suite)?)?;
            println!("wrote {} scenarios to {}", suite.len(), out.join("suite.json").display());
            Ok(())
        }
        Command::Simulate { suite, detectors, cycles } => simulate(cli, &cfg, suite, detectors.as_deref(), *cycles),
        Command::Calibrate { m, p, target, alpha } => {
            let t = match target {
                Target::Fpr => CalibrationTarget::BoundFpr,
                Target::Fnr => CalibrationTarget::BoundFnr,
            };
            let n = calibrate(*m, *p, t, *alpha)?;
            let (fpr, fnr) = (fpr_bound(*m, n, *p)?, fnr_bound(*m, n, *p)?);
            let bound = if t == CalibrationTarget::BoundFpr { fpr } else { fnr };
            println!("M={m} n={n} p={p} target={} bound={bound:.10} fpr_bound={fpr:.10} fnr_bound={fnr:.10}", target_name(*target));
            let json = serde_json::json!({"M": m, "n": n, "p": p, "target": target_name(*target), "alpha": alpha, "bound": bound, "fpr_bound": fpr, "fnr_bound": fnr});
            fs::write(out.join("calibration.json"), serde_json::to_string_pretty(&json)?)?;
            Ok(())
        }
        Command::Evaluate { log, svg } => evaluate(log, out, *svg),
        Command::ReplanStudy { runs } => {
            let mut rc = cfg.replan.clone();
            if let Some(r) = runs {
                rc.runs_per_arm = *r;
            }
            let arms = adaptive_replan_study(&rc, cli.seed)?;
            let mut cdf_rows = Vec::new();
            let mut summary_rows = Vec::new();
            let mut scene_rows = Vec::new();
            for a in &arms {
                let s = &a.summary;
                let rate = s.injection_rate.to_string();
                for (h, f) in interval_cdf(&a.intervals(), rc.long_horizon) {
                    cdf_rows.push(vec![rate.clone(), h.to_string(), f.to_string()]);
                }
                summary_rows.push(vec![rate.clone(), s.runs.to_string(), s.mean_interval.to_string(), s.std_error.to_string(), s.detections.to_string()]);
                for (scene, m) in &s.by_scene {
                    scene_rows.push(vec![rate.clone(), scene.clone(), m.to_string()]);
                }
                println!("rate {:<6} mean interval {:.3} ± {:.3} steps ({} detections)", s.injection_rate, s.mean_interval, s.std_error, s.detections);
            }
            write_csv(&out.join("replan_cdf.csv"), &["injection_rate", "interval", "cdf"], &cdf_rows)?;
            write_csv(&out.join("replan_summary.csv"), &["injection_rate", "runs", "mean_interval", "std_error", "detections"], &summary_rows)?;
            write_csv(&out.join("replan_by_scene.csv"), &["injection_rate", "scene_type", "mean_interval"], &scene_rows)?;
            write_jsonl(&out.join("replan_runs.jsonl"), arms.iter().flat_map(|a| a.runs.iter()))?;
            Ok(())
        }
        Command::Oracle { check, invocations, cases } => oracle(cli.seed, out, *check, *invocations, *cases),
    }
}

fn target_name(t: Target) -> &'static str {
    match t {
        Target::Fpr => "fpr",
        Target::Fnr => "fnr",
    }
}

fn load_suite(cli: &Cli, spec: &SuiteSpec, which: &str, cycles: Option<usize>) -> Result<Vec<Scenario<f64>>> {
    let mut spec = spec.clone();
    if let Some(c) = cycles {
        spec.cycles = c;
    }
    match which {
        "default" => generate_suite(&spec, cli.seed),
        "null" => generate_suite(&SuiteSpec { positive_rate: 0.0, irrelevant_rate: 0.0, ..spec }, cli.seed),
        path => {
            let text = fs::read_to_string(path)?;
            let suite: Vec<Scenario<f64>> = serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{path}: {e}")))?;
            for s in &suite {
                s.validate()?;
            }
            Ok(suite)
        }
    }
}

fn simulate(cli: &Cli, cfg: &CliConfig, which: &str, detectors: Option<&[String]>, cycles: Option<usize>) -> Result<()> {
    let mut sim = cfg.sim.clone();
    if let Some(d) = detectors {
        sim.detectors = d.iter().map(|s| DetectorKind::parse(s.trim())).collect::<Result<_>>()?;
    }
    let suite = load_suite(cli, &cfg.suite, which, cycles)?;
    info!("simulating {} scenarios", suite.len());
    let logs = run_suite(&suite, &sim, cli.workers)?;
    let records: Vec<CycleRecord> = logs.into_iter().flat_map(|l| l.records).collect();
    let out = cli.out_dir.as_path();
    write_jsonl(&out.join("log.jsonl"), &records)?;
    write_log_csv(&out.join("log.csv"), &records)?;
    let positives = records.iter().filter(|r| r.label).count();
    println!("wrote {} cycles ({positives} labeled positive) to {}", records.len(), out.display());
    Ok(())
}

fn evaluate(log: &Path, out: &Path, svg: bool) -> Result<()> {
    let records = read_records(log)?;
    let labels: Vec<bool> = records.iter().map(|r| r.label).collect();

    let mut curves: Vec<(String, RocCurve)> = Vec::new();
    for d in DetectorKind::ALL {
        let scores: Option<Vec<f64>> = records.iter().map(|r| r.scores.get(d)).collect();
        if let Some(s) = scores {
            curves.push((d.name().to_string(), roc(&s, &labels)?));
        }
    }
    let mut roc_rows = Vec::new();
    let mut auroc_rows = Vec::new();
    println!("{:<12} {:>7} {:>8} {:>8}", "detector", "auroc", "best_fpr", "best_fnr");
    for (name, c) in &curves {
        for p in &c.points {
            roc_rows.push(vec![name.clone(), p.fpr.to_string(), p.tpr.to_string(), p.threshold.to_string()]);
        }
        let b = best_point(c);
        auroc_rows.push(vec![name.clone(), c.auroc.to_string(), b.fpr.to_string(), b.fnr.to_string(), b.threshold.to_string()]);
        println!("{name:<12} {:>7.4} {:>8.4} {:>8.4}", c.auroc, b.fpr, b.fnr);
    }
    write_csv(&out.join("roc.csv"), &["detector", "fpr", "tpr", "threshold"], &roc_rows)?;
    write_csv(&out.join("auroc.csv"), &["detector", "auroc", "best_fpr", "best_fnr", "best_threshold"], &auroc_rows)?;

    // Verdict columns, then AND/OR ensembles of the FPR-calibrated QAD with
    // each baseline.
    let mut columns: Vec<(String, Vec<bool>)> = Vec::new();
    if let Some(first) = records.first() {
        for (name, _) in first.verdicts.named() {
            let col: Option<Vec<bool>> = records.iter().map(|r| r.verdicts.named().into_iter().find(|(n, _)| *n == name).map(|(_, v)| v)).collect();
            if let Some(c) = col {
                columns.push((name.to_string(), c));
            }
        }
    }
    if let Some((_, qad)) = columns.iter().find(|(n, _)| n == "qad_fpr").cloned() {
        let baselines: Vec<(String, Vec<bool>)> = columns.iter().filter(|(n, _)| !n.starts_with("qad")).cloned().collect();
        for (name, col) in baselines {
            columns.push((format!("qad_fpr&{name}"), ensemble_log(&[&qad, &col], EnsembleMode::AllOf)));
            columns.push((format!("qad_fpr|{name}"), ensemble_log(&[&qad, &col], EnsembleMode::AnyOf)));
        }
    }
    let mut rate_rows = Vec::new();
    println!("{:<20} {:>7} {:>7}", "verdict", "fpr", "fnr");
    for (name, col) in &columns {
        let r = empirical_rates(col, &labels)?;
        println!("{name:<20} {:>7.4} {:>7.4}", r.fpr.value, r.fnr.value);
        rate_rows.push(vec![
            name.clone(),
            r.fpr.value.to_string(),
            r.fpr.low.to_string(),
            r.fpr.high.to_string(),
            r.fnr.value.to_string(),
            r.fnr.low.to_string(),
            r.fnr.high.to_string(),
            r.fpr.trials.to_string(),
            r.fnr.trials.to_string(),
        ]);
    }
    write_csv(&out.join("rates.csv"), &["detector", "fpr", "fpr_low", "fpr_high", "fnr", "fnr_low", "fnr_high", "negatives", "positives"], &rate_rows)?;
    if svg {
        fs::write(out.join("roc.svg"), roc_svg(&curves))?;
    }
    Ok(())
}

fn oracle(seed: u64, out: &Path, check: OracleCheck, invocations: usize, cases: usize) -> Result<()> {
    let all = check == OracleCheck::All;
    if all || check == OracleCheck::Bounds {
        bounds_check(seed, out)?;
    }
    if all || check == OracleCheck::Quantile {
        quantile_check(seed, out, cases)?;
    }
    if all || check == OracleCheck::Latency {
        let r = detection_latency(100, 1, invocations, seed)?;
        println!(
            "latency: M=100 mean {:.3} us, p99 {:.3} us, max {:.3} us over {} invocations",
            r.mean_seconds * 1e6,
            r.p99_seconds * 1e6,
            r.max_seconds * 1e6,
            r.invocations
        );
        fs::write(out.join("latency.json"), serde_json::to_string_pretty(&r)?)?;
    }
    Ok(())
}

/// Closed-form bounds against Monte Carlo at the worst non-anomalous
/// observation, with uniform costs so the boundary is exactly `1 − p`.
fn bounds_check(seed: u64, out: &Path) -> Result<()> {
    const TRIALS: usize = 20_000;
    let mut rows = Vec::new();
    let mut r = rng::stream(seed, &[1]);
    for (m, p) in [(20usize, 0.25), (100, 0.05), (100, 0.25)] {
        for target in [CalibrationTarget::BoundFpr, CalibrationTarget::BoundFnr] {
            let n = calibrate(m, p, target, 0.05)?;
            let (fpr, fnr) = (fpr_bound(m, n, p)?, fnr_bound(m, n, p)?);
            let boundary = 1.0 - p;
            let fired = (0..TRIALS)
                .filter(|_| (0..m).filter(|_| r.random::<f64>() <= boundary).count() >= m - n)
                .count();
            let mc = fired as f64 / TRIALS as f64;
            println!("bounds: M={m} p={p} n={n} fpr_bound={fpr:.6} fnr_bound={fnr:.6} sum-1={:.1e} mc_fpr={mc:.6}", fpr + fnr - 1.0);
            rows.push(vec![m.to_string(), n.to_string(), p.to_string(), fpr.to_string(), fnr.to_string(), mc.to_string()]);
        }
    }
    write_csv(&out.join("oracle_bounds.csv"), &["M", "n", "p", "fpr_bound", "fnr_bound", "mc_fpr"], &rows)
}

/// Detector verdicts against a 10⁵-sample quantile oracle on cases away
/// from the decision boundary.
fn quantile_check(seed: u64, out: &Path, cases: usize) -> Result<()> {
    const ORACLE_SAMPLES: usize = 100_000;
    const BAND: f64 = 0.02;
    let mut r = rng::stream(seed, &[2]);
    let (mut kept, mut agree) = (0usize, 0usize);
    for _ in 0..cases {
        let p = [0.05, 0.1, 0.25][r.random_range(0..3)];
        let m = [200usize, 500, 1000][r.random_range(0..3)];
        let n = (p * m as f64).round() as usize;
        let samples: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut r)).collect();
        let set = CostSampleSet::from_unsorted(0, samples)?;
        let z: f64 = StandardNormal.sample(&mut r);
        let observed = 1.5 * z;
        let o = quantile_oracle(observed, || StandardNormal.sample(&mut r), ORACLE_SAMPLES, p);
        if (o.quantile - (1.0 - p)).abs() <= BAND {
            continue;
        }
        kept += 1;
        agree += usize::from(detect_step(observed, &set, n)? == o.anomaly);
    }
    let frac = if kept == 0 { 1.0 } else { agree as f64 / kept as f64 };
    println!("quantile: {agree}/{kept} agree ({frac:.4}) outside the ±{BAND} band");
    write_csv(&out.join("oracle_quantile.csv"), &["cases", "kept", "agree", "fraction"], &[vec![cases.to_string(), kept.to_string(), agree.to_string(), frac.to_string()]])
}
