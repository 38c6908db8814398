//! Artifact emission: trace CSV, metrics JSON, and sweep tables.
//!
//! The trace column order is a compatibility contract:
//! `t, q1..qn, qd1..qdn, dq1..dqn, dqd1..dqdn, tau1..taun, V,
//! margq1..margqn, margdq1..margdqn`. Floats are written with 17
//! significant digits so repeated runs produce byte-identical files.

use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};

use crate::analysis::MetricsReport;
use crate::error::Result;
use crate::scenario::OutputConfig;
use crate::sim::{SimTrace, SweepSummary};

/// Environment variable overriding the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "LIMIT_TORQUE_OUT";

/// Scientific notation with 17 significant digits (round-trip exact).
fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Output directory after applying the `LIMIT_TORQUE_OUT` override.
pub fn resolve_output_dir(cfg: &OutputConfig) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from(&cfg.directory),
    }
}

/// CSV header for an n-joint trace.
pub fn trace_header(n: usize) -> String {
    let cols = |prefix: &str| -> String {
        (1..=n)
            .map(|i| format!("{prefix}{i}"))
            .collect::<Vec<_>>()
            .join(",")
    };
    format!(
        "t,{},{},{},{},{},V,{},{}",
        cols("q"),
        cols("qd"),
        cols("dq"),
        cols("dqd"),
        cols("tau"),
        cols("margq"),
        cols("margdq")
    )
}

/// Write the trace in the contract column order.
pub fn write_trace_csv(trace: &SimTrace, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{}", trace_header(trace.n()))?;
    for (k, s) in trace.samples.iter().enumerate() {
        let mut fields = Vec::with_capacity(2 + 7 * trace.n());
        fields.push(float17(s.t));
        for v in [&s.q, &s.q_d, &s.dq, &s.dq_d, &s.tau] {
            fields.extend(v.iter().map(|x| float17(*x)));
        }
        fields.push(float17(s.v));
        fields.extend(trace.margins_q(k).iter().map(|x| float17(*x)));
        fields.extend(trace.margins_dq(k).iter().map(|x| float17(*x)));
        writeln!(w, "{}", fields.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_metrics_json(report: &MetricsReport, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut text = serde_json::to_string_pretty(report).expect("metrics serialize");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// One row per control period, in input order.
pub fn write_sweep_csv(rows: &[SweepSummary], path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(
        w,
        "dt_control,max_velocity_overshoot,max_position_overshoot,torque_oscillation_index,converged,diverged"
    )?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            float17(r.dt_control),
            float17(r.max_velocity_overshoot),
            float17(r.max_position_overshoot),
            float17(r.torque_oscillation_index),
            r.converged,
            r.diverged
        )?;
    }
    w.flush()?;
    Ok(())
}
