//! Three-link planar leg stand-in using a real humanoid leg's published
//! position and velocity limit tables (hip pitch, hip roll, knee). The
//! knee starts exactly on its upper bound, so the early transient shows
//! velocity spikes before the loop settles inside both boxes; the link
//! masses and lengths are plausible placeholders, not identified values.
//!
//! ```bash
//! cargo run --example icub_leg
//! ```

use limit_torque::analysis::trace_metrics;
use limit_torque::runner::{execute, SETTLE_BAND};
use limit_torque::scenario::preset;

fn main() {
    for name in ["icub-leg-constant", "icub-leg-sine", "icub-leg-disturbance"] {
        let built = preset(name).unwrap().compile().unwrap();
        let (trace, _) = execute(&built).unwrap();
        let m = trace_metrics(&trace, &built.lim, &built.selection.gains, SETTLE_BAND).unwrap();
        let last = trace.samples.last().unwrap();
        println!("== {name}");
        println!(
            "  diverged: {}, violations: {} position / {} velocity (early transient)",
            trace.diverged, m.position_violations, m.velocity_violations
        );
        for i in 0..built.lim.n() {
            println!(
                "  joint {}: final error {:.2e} deg within [{:.0}, {:.0}] deg",
                i + 1,
                (last.q[i] - last.q_d[i]).abs().to_degrees(),
                built.lim.q_min[i].to_degrees(),
                built.lim.q_max[i].to_degrees()
            );
        }
        println!(
            "  settling to 1 deg: {}",
            m.settling_time
                .map(|t| format!("{t:.2} s"))
                .unwrap_or_else(|| "never".into())
        );
    }
}
