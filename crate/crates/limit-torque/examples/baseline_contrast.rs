//! Computed-torque PD versus the limit-aware law on the same step task.
//! The baseline converges but tears through the velocity box; the
//! transformed controller stays inside both boxes at a comparable
//! settling time.
//!
//! ```bash
//! cargo run --example baseline_contrast
//! ```

use limit_torque::analysis::trace_metrics;
use limit_torque::runner::{execute, SETTLE_BAND};
use limit_torque::scenario::preset;

fn main() {
    let mut rows = Vec::new();
    for name in ["two-link-baseline", "two-link-constant"] {
        let built = preset(name).unwrap().compile().unwrap();
        let (trace, _) = execute(&built).unwrap();
        let m = trace_metrics(&trace, &built.lim, &built.selection.gains, SETTLE_BAND).unwrap();
        let peak_dq: Vec<f64> = (0..built.lim.n())
            .map(|i| {
                trace
                    .samples
                    .iter()
                    .map(|s| s.dq[i].abs().to_degrees())
                    .fold(0.0, f64::max)
            })
            .collect();
        rows.push((name, m, peak_dq));
    }

    println!("{:<20} {:>10} {:>10} {:>12} {:>22}", "controller", "pos viol", "vel viol", "settle (s)", "peak |dq| (deg/s)");
    for (name, m, peak_dq) in &rows {
        println!(
            "{:<20} {:>10} {:>10} {:>12} {:>22}",
            if *name == "two-link-baseline" { "computed-torque PD" } else { "limit-aware (eq9)" },
            m.position_violations,
            m.velocity_violations,
            m.settling_time
                .map(|t| format!("{t:.2}"))
                .unwrap_or_else(|| "-".into()),
            peak_dq
                .iter()
                .map(|v| format!("{v:.0}"))
                .collect::<Vec<_>>()
                .join(" / ")
        );
    }
    println!("\nvelocity box: 90 deg/s on joint 1, -90..180 deg/s on joint 2");
    println!("(the PD baseline here is a plain computed-torque law, not the comparison controller from the literature)");
}
