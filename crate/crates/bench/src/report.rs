//! CSV and JSON emission and per-rate summaries.

use std::io::Write;

use serde::Serialize;

use crate::error::BenchResult;
use crate::instance::OutlierMode;
use crate::runner::{BenchRecord, Solver};

pub const CSV_HEADER: [&str; 9] = [
    "trial",
    "solver",
    "outlier_rate",
    "rot_err_deg",
    "trans_err",
    "runtime_s",
    "precision",
    "recall",
    "status",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the records with LF line endings and shortest round-trip floats.
/// Failed metrics are empty fields.
pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> BenchResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.trial.to_string(),
            r.solver.name().to_string(),
            r.outlier_rate.to_string(),
            opt(r.rot_err_deg),
            opt(r.trans_err),
            r.runtime_s.to_string(),
            opt(r.precision),
            opt(r.recall),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(records: &[BenchRecord]) -> BenchResult<String> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Writes the records as a pretty-printed JSON array.
pub fn write_json<W: Write>(records: &[BenchRecord], mut out: W) -> BenchResult<()> {
    serde_json::to_writer_pretty(&mut out, records)?;
    out.write_all(b"\n")?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateSummary {
    pub solver: Solver,
    pub outlier_mode: OutlierMode,
    pub outlier_rate: f64,
    pub trials: usize,
    pub failures: usize,
    pub median_rot_err_deg: f64,
    pub median_trans_err: f64,
    pub median_runtime_s: f64,
}

/// Median of `values`; the upper middle element breaks ties so that a
/// majority of failures (infinite values) yields an infinite median.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        let (a, b) = (v[m / 2 - 1], v[m / 2]);
        if a.is_infinite() || b.is_infinite() {
            b
        } else {
            (a + b) / 2.0
        }
    }
}

/// Groups records by (solver, mode, rate) in first-seen order.
pub fn summarize(records: &[BenchRecord]) -> Vec<RateSummary> {
    let mut keys: Vec<(Solver, OutlierMode, f64)> = Vec::new();
    for r in records {
        let k = (r.solver, r.outlier_mode, r.outlier_rate);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(solver, mode, rate)| {
            let group: Vec<&BenchRecord> = records
                .iter()
                .filter(|r| r.solver == solver && r.outlier_mode == mode && r.outlier_rate == rate)
                .collect();
            let col = |f: fn(&BenchRecord) -> f64| median(&group.iter().map(|r| f(r)).collect::<Vec<_>>());
            RateSummary {
                solver,
                outlier_mode: mode,
                outlier_rate: rate,
                trials: group.len(),
                failures: group.iter().filter(|r| !r.succeeded()).count(),
                median_rot_err_deg: col(BenchRecord::rot_err_or_inf),
                median_trans_err: col(BenchRecord::trans_err_or_inf),
                median_runtime_s: col(|r| r.runtime_s),
            }
        })
        .collect()
}

pub fn format_summary(rows: &[RateSummary]) -> String {
    let mut s = format!(
        "{:<7} {:<10} {:>6} {:>6} {:>6} {:>12} {:>10} {:>10}\n",
        "solver", "mode", "rate", "trials", "failed", "med_rot_deg", "med_trans", "med_time_s"
    );
    for r in rows {
        s.push_str(&format!(
            "{:<7} {:<10} {:>6.2} {:>6} {:>6} {:>12.4} {:>10.5} {:>10.4}\n",
            r.solver.name(),
            r.outlier_mode.name(),
            r.outlier_rate,
            r.trials,
            r.failures,
            r.median_rot_err_deg,
            r.median_trans_err,
            r.median_runtime_s
        ));
    }
    s
}
