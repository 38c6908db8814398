//! Step response to a target 2.5 degrees from the corner of the position
//! box. The closed loop reaches it without ever leaving the position or
//! velocity limits.
//!
//! ```bash
//! cargo run --example two_link_constant
//! ```

use limit_torque::runner::run_scenario;
use limit_torque::scenario::preset;

fn main() {
    let cfg = preset("two-link-constant").unwrap();
    let artifacts = run_scenario(&cfg).unwrap();
    let m = &artifacts.metrics;
    let trace = &artifacts.trace;

    let last = trace.samples.last().unwrap();
    println!("two-link constant target, {} s at 1 ms:", last.t);
    for i in 0..trace.n() {
        println!(
            "  joint {}: final error {:.2e} deg, target {:.1} deg",
            i + 1,
            (last.q[i] - last.q_d[i]).abs().to_degrees(),
            last.q_d[i].to_degrees()
        );
    }
    println!(
        "  limit violations: {} position, {} velocity",
        m.position_violations, m.velocity_violations
    );
    println!(
        "  worst normalized margins: {:.4} position, {:.4} velocity (positive = inside)",
        m.min_position_margin, m.min_velocity_margin
    );
    println!(
        "  settling time to 1 deg: {}",
        m.settling_time
            .map(|t| format!("{t:.2} s"))
            .unwrap_or_else(|| "never".into())
    );
    println!(
        "  Lyapunov increases beyond tolerance: {}",
        m.lyapunov_increase_count
    );
    println!("trace written to {}", artifacts.trace_path.display());
    println!("metrics written to {}", artifacts.metrics_path.display());
}
