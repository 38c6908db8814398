//! Schur-condition check on gain sets: the diagonal gains must be positive
//! and `k3 - k2^2/k1` must be positive per joint, or the stability argument
//! behind the controller does not apply.
//!
//! ```bash
//! cargo run --example gain_validation
//! ```

use limit_torque::controller::{validate_gains, GainSet, Variant};
use nalgebra::dvector;

fn show(label: &str, g: &GainSet) {
    let report = validate_gains(g);
    println!(
        "{label}: {} (margins {})",
        if report.pass { "PASS" } else { "FAIL" },
        report
            .schur_margins
            .iter()
            .map(|m| format!("{m:.3}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    for issue in &report.issues {
        println!("  - {issue}");
    }
}

fn main() {
    show(
        "identity-style set (1, 1, 2)",
        &GainSet::uniform(2, 1.0, 1.0, 2.0, Variant::Eq9),
    );
    show(
        "published two-link set (22,505 / 20,50 / 10,5)",
        &GainSet::new(
            dvector![22.0, 505.0],
            dvector![20.0, 50.0],
            dvector![10.0, 5.0],
            Variant::Eq9,
        ),
    );
    show(
        "published leg set (2000, 310, 50)",
        &GainSet::uniform(3, 2000.0, 310.0, 50.0, Variant::Eq9),
    );
    show(
        "preset two-link set (50, 10, 5)",
        &GainSet::uniform(2, 50.0, 10.0, 5.0, Variant::Eq9),
    );
    println!("\nA failing set can still be simulated with allow_invalid_gains,");
    println!("but the run is reported with its theorem preconditions unmet.");
}
