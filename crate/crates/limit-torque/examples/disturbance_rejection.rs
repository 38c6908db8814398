//! Containment under an unmodeled torque pulse: after the step task
//! settles, a two-second pulse at half the nominal peak torque shoves the
//! arm; the position box is never violated.
//!
//! ```bash
//! cargo run --example disturbance_rejection
//! ```

use limit_torque::analysis::trace_metrics;
use limit_torque::runner::{execute, SETTLE_BAND};
use limit_torque::scenario::{preset, DisturbanceConfig};

fn main() {
    let cfg = preset("two-link-constant").unwrap();
    let built = cfg.compile().unwrap();
    let (clean, _) = execute(&built).unwrap();
    let peak: Vec<f64> = (0..built.lim.n())
        .map(|i| clean.samples.iter().map(|s| s.tau[i].abs()).fold(0.0, f64::max))
        .collect();
    println!(
        "nominal peak torque: {} N m",
        peak.iter().map(|p| format!("{p:.1}")).collect::<Vec<_>>().join(" / ")
    );

    let mut disturbed = cfg.clone();
    disturbed.sim.disturbances = vec![DisturbanceConfig {
        t_start: 4.0,
        t_end: 6.0,
        torque: peak.iter().map(|p| 0.5 * p).collect(),
    }];
    let built = disturbed.compile().unwrap();
    let (trace, _) = execute(&built).unwrap();
    let m = trace_metrics(&trace, &built.lim, &built.selection.gains, SETTLE_BAND).unwrap();

    println!(
        "pulse of {} N m over t = 4..6 s:",
        disturbed.sim.disturbances[0]
            .torque
            .iter()
            .map(|p| format!("{p:.1}"))
            .collect::<Vec<_>>()
            .join(" / ")
    );
    println!(
        "  position violations: {} (worst normalized margin {:.4})",
        m.position_violations, m.min_position_margin
    );
    println!(
        "  velocity violations: {} (worst normalized margin {:.4})",
        m.velocity_violations, m.min_velocity_margin
    );
    println!(
        "  settling after the pulse: {}",
        m.settling_time
            .map(|t| format!("{t:.2} s"))
            .unwrap_or_else(|| "never".into())
    );
}
