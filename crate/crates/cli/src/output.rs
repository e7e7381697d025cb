//! File writers. CSV column sets are fixed; see the README for their
//! meaning.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use qad_core::sim::CycleRecord;
use qad_core::{Error, Result};
use serde::Serialize;

pub const LOG_COLUMNS: [&str; 23] = [
    "scenario_id",
    "scene_type",
    "cycle",
    "start_step",
    "agent",
    "label",
    "injection_active",
    "injected_mode",
    "oracle_quantile",
    "score_qad",
    "score_likelihood",
    "score_udt",
    "score_pdt",
    "score_ttc",
    "score_reach",
    "verdict_qad_fpr",
    "verdict_qad_fnr",
    "verdict_likelihood",
    "verdict_udt",
    "verdict_pdt",
    "verdict_ttc",
    "verdict_reach",
    "plan_cost",
];

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Schema(format!("{other:?}")),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for it in items {
        serde_json::to_writer(&mut w, &it)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<CycleRecord>> {
    let r = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Schema(format!("{}:{}: {e}", path.display(), i + 1)))?);
    }
    Ok(out)
}

pub fn write_log_csv(path: &Path, records: &[CycleRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(LOG_COLUMNS).map_err(csv_err)?;
    for r in records {
        let s = &r.scores;
        let v = &r.verdicts;
        let agent = r.injected_agent.or(r.qad_event.as_ref().map(|e| e.agent_id));
        let mode = r.injected_mode.map(|m| serde_json::to_value(m).ok().and_then(|x| x.as_str().map(str::to_string)).unwrap_or_default());
        let row = [
            r.scenario_id.clone(),
            r.scene_type.clone(),
            r.cycle.to_string(),
            r.start_step.to_string(),
            opt(agent),
            r.label.to_string(),
            r.injection_active.to_string(),
            mode.unwrap_or_default(),
            opt(r.oracle.map(|o| o.quantile)),
            opt(s.qad),
            opt(s.likelihood),
            opt(s.udt),
            opt(s.pdt),
            opt(s.ttc),
            opt(s.reach),
            opt(v.qad_fpr),
            opt(v.qad_fnr),
            opt(v.likelihood),
            opt(v.udt),
            opt(v.pdt),
            opt(v.ttc),
            opt(v.reach),
            r.plan_cost.to_string(),
        ];
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a header and string rows.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
