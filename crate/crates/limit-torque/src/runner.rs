//! Orchestration behind the command-line interface: run a scenario to
//! artifacts, sweep control periods, and map outcomes to exit codes.

use std::path::{Path, PathBuf};

use crate::analysis::{error_dynamics_residual, trace_metrics, MetricsReport};
use crate::controller::Variant;
use crate::error::{Error, Result};
use crate::output::{resolve_output_dir, write_metrics_json, write_sweep_csv, write_trace_csv};
use crate::scenario::{BuiltScenario, ScenarioConfig};
use crate::sim::{simulate, sweep_timestep, ControlLaw, SimTrace, SweepSummary};

/// Exit code for a clean run.
pub const EXIT_OK: i32 = 0;
/// Exit code when the trace diverged.
pub const EXIT_DIVERGED: i32 = 2;
/// Exit code for configuration problems.
pub const EXIT_CONFIG: i32 = 3;

/// Default per-joint settling band used by the metrics (1 degree).
pub const SETTLE_BAND: f64 = std::f64::consts::PI / 180.0;

/// Everything a completed run produced.
#[derive(Debug)]
pub struct RunArtifacts {
    pub trace: SimTrace,
    pub metrics: MetricsReport,
    pub trace_path: PathBuf,
    pub metrics_path: PathBuf,
}

/// Simulate a compiled scenario and compute its metrics without touching
/// the filesystem.
pub fn execute(built: &BuiltScenario) -> Result<(SimTrace, MetricsReport)> {
    let trace = simulate(
        &built.model,
        &built.lim,
        &built.selection,
        &built.spec,
        &built.sim,
    )?;
    let mut metrics = trace_metrics(&trace, &built.lim, &built.selection.gains, SETTLE_BAND)?;
    // The error-dynamics check applies to the continuous-rate proposed
    // controller in its original variant.
    let continuous = (built.sim.dt_control - built.sim.dt_physics).abs() < 1e-12;
    if matches!(built.selection.law, ControlLaw::Proposed)
        && built.selection.gains.variant == Variant::Eq9
        && continuous
        && built.sim.dt_physics <= 1e-3
        && !trace.diverged
        && trace.samples.len() >= 3
    {
        let residual =
            error_dynamics_residual(&trace, &built.model, &built.lim, &built.selection.gains)?;
        metrics.max_eq14_residual = Some(residual.max_residual);
    }
    Ok((trace, metrics))
}

/// Run a scenario and write its trace CSV and metrics JSON.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunArtifacts> {
    let built = cfg.compile()?;
    let (trace, metrics) = execute(&built)?;
    let dir = resolve_output_dir(&built.output);
    let trace_path = dir.join(&built.output.trace_filename);
    let metrics_path = dir.join(&built.output.metrics_filename);
    write_trace_csv(&trace, &trace_path)?;
    write_metrics_json(&metrics, &metrics_path)?;
    Ok(RunArtifacts {
        trace,
        metrics,
        trace_path,
        metrics_path,
    })
}

/// Run a scenario once per control period and write the summary table.
pub fn run_sweep(cfg: &ScenarioConfig, dts: &[f64]) -> Result<(Vec<SweepSummary>, PathBuf)> {
    if dts.is_empty() {
        return Err(Error::Config {
            path: "--dts".into(),
            message: "need at least one control period".into(),
        });
    }
    let built = cfg.compile()?;
    let rows = sweep_timestep(
        &built.model,
        &built.lim,
        &built.selection,
        &built.spec,
        &built.sim,
        dts,
    )?;
    let dir = resolve_output_dir(&built.output);
    let path = dir.join("sweep.csv");
    write_sweep_csv(&rows, &path)?;
    Ok((rows, path))
}

/// Load a config file, run it, and map the outcome to the CLI exit code.
/// Messages go to stderr; a short summary goes to stdout.
pub fn run_path(path: &Path) -> i32 {
    let cfg = match ScenarioConfig::from_path(path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    run_config(&cfg)
}

/// Run an in-memory config, mapping the outcome to the CLI exit code.
pub fn run_config(cfg: &ScenarioConfig) -> i32 {
    match run_scenario(cfg) {
        Ok(artifacts) => {
            println!(
                "trace:   {}\nmetrics: {}",
                artifacts.trace_path.display(),
                artifacts.metrics_path.display()
            );
            println!(
                "violations: position {} / velocity {}; settling: {}",
                artifacts.metrics.position_violations,
                artifacts.metrics.velocity_violations,
                artifacts
                    .metrics
                    .settling_time
                    .map(|t| format!("{t:.3} s"))
                    .unwrap_or_else(|| "not settled".into())
            );
            if !artifacts.metrics.gains_valid {
                println!("note: gain set fails validation; theorem preconditions unmet");
            }
            if artifacts.trace.diverged {
                eprintln!(
                    "run diverged at t = {:.6} s",
                    artifacts.trace.diverged_at.unwrap_or(f64::NAN)
                );
                EXIT_DIVERGED
            } else {
                EXIT_OK
            }
        }
        Err(e @ Error::Config { .. }) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DIVERGED
        }
    }
}
