//! CSV writers. Rates and means carry 6 significant digits; trace PA values
//! and probabilities are written with round-trip precision.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use photon_tow::engine::TrialTrace;
use photon_tow::figures::Check;
use photon_tow::{CdrCurves, SweepPoint};

/// Formats `x` with 6 significant digits in plain decimal notation.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

fn finish<W: Write>(mut w: csv::Writer<W>, path: &Path) -> Result<()> {
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

pub fn curves_header(curves: &CdrCurves) -> Vec<String> {
    let levels = curves.coarse_cdr.first().map_or(0, Vec::len);
    let nodes = curves.mean_pa.first().map_or(0, Vec::len);
    let mut header = vec!["cycle".to_string(), "fine_cdr".to_string()];
    header.extend((1..=levels).map(|l| format!("coarse_cdr_L{l}")));
    header.extend((1..=nodes).map(|n| format!("mean_pa_{n}")));
    header
}

pub fn write_curves(path: &Path, curves: &CdrCurves) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(curves_header(curves))?;
    for t in 0..curves.cycles() {
        let mut row = vec![(t + 1).to_string(), sig6(curves.fine_cdr[t])];
        row.extend(curves.coarse_cdr[t].iter().map(|&v| sig6(v)));
        row.extend(curves.mean_pa[t].iter().map(|&v| sig6(v)));
        w.write_record(row)?;
    }
    finish(w, path)
}

pub fn write_traces(path: &Path, traces: &[TrialTrace]) -> Result<()> {
    let mut w = writer(path)?;
    let Some(first) = traces.first().and_then(|t| t.records.first()) else {
        return finish(w, path);
    };
    let nodes = first.pa_values.len();
    let arms = first.leaf_distribution.len();
    let mut header = vec![
        "trial".to_string(),
        "cycle".to_string(),
        "arm".to_string(),
        "rewarded".to_string(),
    ];
    header.extend((1..=nodes).map(|n| format!("pa_{n}")));
    header.extend((1..=nodes).map(|n| format!("rounded_pa_{n}")));
    header.extend((1..=arms).map(|a| format!("p_arm_{a}")));
    w.write_record(&header)?;
    for trace in traces {
        for (c, r) in trace.records.iter().enumerate() {
            let mut row = vec![
                trace.trial.to_string(),
                (c + 1).to_string(),
                (r.arm + 1).to_string(),
                u8::from(r.rewarded).to_string(),
            ];
            row.extend(r.pa_values.iter().map(f64::to_string));
            row.extend(r.rounded.iter().map(i32::to_string));
            row.extend(r.leaf_distribution.iter().map(f64::to_string));
            w.write_record(row)?;
        }
    }
    finish(w, path)
}

pub fn write_snapshot(path: &Path, points: &[SweepPoint]) -> Result<()> {
    let mut w = writer(path)?;
    let levels = points.first().map_or(0, |p| p.coarse_at_snapshot.len());
    let mut header = vec!["resolution".to_string(), "fine_cdr".to_string()];
    header.extend((1..=levels).map(|l| format!("coarse_cdr_L{l}")));
    w.write_record(header)?;
    for p in points {
        let mut row = vec![p.resolution.to_string(), sig6(p.fine_at_snapshot)];
        row.extend(p.coarse_at_snapshot.iter().map(|&v| sig6(v)));
        w.write_record(row)?;
    }
    finish(w, path)
}

/// Per-resolution values at the last cycle, plus the first cycle at which the
/// fine rate reaches one half (empty if never).
pub fn write_final_table(path: &Path, points: &[SweepPoint]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "resolution",
        "cycle",
        "fine_cdr",
        "coarse_cdr_L1",
        "first_cycle_fine_ge_0.5",
    ])?;
    for p in points {
        let last = p.curves.cycles();
        let coarse = p.curves.coarse_cdr[last - 1]
            .first()
            .copied()
            .unwrap_or(f64::NAN);
        w.write_record([
            p.resolution.to_string(),
            last.to_string(),
            sig6(p.curves.fine_cdr[last - 1]),
            sig6(coarse),
            p.curves
                .first_fine_at_least(0.5)
                .map_or(String::new(), |c| c.to_string()),
        ])?;
    }
    finish(w, path)
}

pub fn write_summary(path: &Path, figure: &str, checks: &[Check]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["figure", "check", "status", "detail"])?;
    for c in checks {
        w.write_record([
            figure,
            c.name.as_str(),
            if c.passed { "pass" } else { "fail" },
            c.detail.as_str(),
        ])?;
    }
    finish(w, path)
}
