//! Verification oracles and metrics over recorded traces: Lyapunov value
//! and decrement counting, the closed-loop error-dynamics residual, tracking
//! statistics, and limit-margin audits.

use nalgebra::DVector;
use serde::Serialize;

use crate::controller::{transformed_bias, validate_gains, GainSet};
use crate::dynamics::PlanarChainModel;
use crate::error::{Error, Result};
use crate::limits::{check_dim, LimitSet};
use crate::param::sech2;
use crate::sim::SimTrace;

/// Quadratic Lyapunov value of the transformed errors,
/// `V = 1/2 (e_zeta' k1 e_zeta + 2 e_zeta' k2 e_psi + e_psi' k3 e_psi)`.
pub fn lyapunov_value(e_zeta: &DVector<f64>, e_psi: &DVector<f64>, g: &GainSet) -> f64 {
    let mut v = 0.0;
    for i in 0..e_zeta.len() {
        v += g.k1[i] * e_zeta[i] * e_zeta[i]
            + 2.0 * g.k2[i] * e_zeta[i] * e_psi[i]
            + g.k3[i] * e_psi[i] * e_psi[i];
    }
    0.5 * v
}

/// Outcome of the error-dynamics consistency check along a trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    /// Max norm of the defect over both lines and all interior samples.
    pub max_residual: f64,
    /// Kinematic line: `J_zeta e_zeta_dot - delta_dq (tanh psi - tanh psi_r)`.
    pub line1_max: f64,
    /// Torque line, evaluated through the recorded torque and the model.
    pub line2_max: f64,
    /// False when the trace is too coarse for finite differencing.
    pub reliable: bool,
}

/// Evaluate the closed-loop error dynamics along a trace recorded at the
/// continuous rate (control period equal to the physics step).
///
/// Error rates come from central differences of the recorded errors; the
/// exogenous acceleration comes from inverting the transformed dynamics at
/// the recorded torque, so a corrupted torque column shows up in the second
/// line.
pub fn error_dynamics_residual(
    trace: &SimTrace,
    model: &PlanarChainModel,
    lim: &LimitSet,
    g: &GainSet,
) -> Result<ResidualReport> {
    let n = lim.n();
    check_dim(n, trace.n())?;
    if trace.samples.len() < 3 {
        return Err(Error::Config {
            path: "trace".into(),
            message: "need at least three samples to differentiate".into(),
        });
    }
    let dt = trace.dt_physics;
    let reliable = dt <= 1e-3 && (trace.dt_control - trace.dt_physics).abs() < 1e-12;
    let mut line1_max = 0.0f64;
    let mut line2_max = 0.0f64;
    for k in 1..trace.samples.len() - 1 {
        let prev = &trace.samples[k - 1];
        let s = &trace.samples[k];
        let next = &trace.samples[k + 1];
        let e_zeta_dot = (&next.e_zeta - &prev.e_zeta) / (2.0 * dt);
        let e_psi_dot = (&next.e_psi - &prev.e_psi) / (2.0 * dt);
        let psi_r = |smp: &crate::sim::Sample| &smp.psi - &smp.e_psi;
        let psi_r_dot_fd = (psi_r(next) - psi_r(prev)) / (2.0 * dt);

        // psi_dot from the transformed dynamics at the recorded torque.
        let h = transformed_bias(&s.q, &s.dq, model)?;
        let mass = model.mass_matrix(&s.q);
        let accel = mass
            .cholesky()
            .map(|c| c.solve(&(&s.tau - &h)))
            .ok_or(Error::SingularMassMatrix)?;
        for i in 0..n {
            let j_zeta = lim.delta_q[i] * sech2(s.zeta[i]);
            let j_psi = lim.delta_dq[i] * sech2(s.psi[i]);
            let r = s.psi[i] - s.e_psi[i];
            let line1 = j_zeta * e_zeta_dot[i]
                - lim.delta_dq[i] * (s.psi[i].tanh() - r.tanh());
            // qdd = J_psi psi_dot.
            let psi_dot = accel[i] / j_psi;
            let line2 = (psi_dot - psi_r_dot_fd[i]) + g.k1[i] / g.k2[i] * e_zeta_dot[i]
                + g.k2[i] * s.e_zeta[i]
                + g.k3[i] * s.e_psi[i];
            line1_max = line1_max.max(line1.abs());
            line2_max = line2_max.max(line2.abs());
        }
        // Unused but kept symmetric with line 1's defect definition.
        let _ = e_psi_dot;
    }
    Ok(ResidualReport {
        max_residual: line1_max.max(line2_max),
        line1_max,
        line2_max,
        reliable,
    })
}

/// Summary statistics of one trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    /// Per-joint RMS tracking error over the whole trace (rad).
    pub rms_error: Vec<f64>,
    /// Per-joint RMS tracking error over the second half of the trace (rad).
    pub rms_error_steady: Vec<f64>,
    /// First time after which every joint stays within the settle band.
    pub settling_time: Option<f64>,
    /// Smallest normalized distance to the position box over the trace
    /// (`1 - max_i |(q - q0)/delta_q|`); positive means always inside.
    pub min_position_margin: f64,
    pub min_velocity_margin: f64,
    /// Samples with any normalized position offset at or beyond 1.
    pub position_violations: usize,
    pub velocity_violations: usize,
    /// Steps whose Lyapunov increase exceeds `1e-6 * max(V)`.
    pub lyapunov_increase_count: usize,
    /// Filled by the run orchestrator when the residual check applies.
    pub max_eq14_residual: Option<f64>,
    /// Whether the gain set passes its validity conditions.
    pub gains_valid: bool,
    pub diverged: bool,
}

/// Tolerance factor for counting Lyapunov increases.
pub const LYAPUNOV_INCREASE_TOL: f64 = 1e-6;

/// Floor on `max(V)` in the increase tolerance, so traces whose V is pure
/// rounding noise (an equilibrium hold) do not count spurious increases.
const LYAPUNOV_NOISE_FLOOR: f64 = 1e-12;

/// Compute all trace statistics. `settle_band` is the per-joint tracking
/// band (rad) used for the settling time.
pub fn trace_metrics(
    trace: &SimTrace,
    lim: &LimitSet,
    g: &GainSet,
    settle_band: f64,
) -> Result<MetricsReport> {
    let n = lim.n();
    check_dim(n, trace.n())?;
    let len = trace.samples.len();
    if len == 0 {
        return Err(Error::Config {
            path: "trace".into(),
            message: "empty trace".into(),
        });
    }

    let mut sq_sum = vec![0.0f64; n];
    let mut sq_sum_steady = vec![0.0f64; n];
    let steady_from = len / 2;
    let mut min_pos_margin = f64::INFINITY;
    let mut min_vel_margin = f64::INFINITY;
    let mut pos_violations = 0usize;
    let mut vel_violations = 0usize;
    let mut v_max = 0.0f64;
    for (k, s) in trace.samples.iter().enumerate() {
        for i in 0..n {
            let e = s.q[i] - s.q_d[i];
            sq_sum[i] += e * e;
            if k >= steady_from {
                sq_sum_steady[i] += e * e;
            }
        }
        let mq = trace.margins_q(k).amax();
        let mdq = trace.margins_dq(k).amax();
        min_pos_margin = min_pos_margin.min(1.0 - mq);
        min_vel_margin = min_vel_margin.min(1.0 - mdq);
        if mq >= 1.0 {
            pos_violations += 1;
        }
        if mdq >= 1.0 {
            vel_violations += 1;
        }
        v_max = v_max.max(s.v);
    }
    let rms_error: Vec<f64> = sq_sum.iter().map(|s| (s / len as f64).sqrt()).collect();
    let steady_len = (len - steady_from).max(1);
    let rms_error_steady: Vec<f64> = sq_sum_steady
        .iter()
        .map(|s| (s / steady_len as f64).sqrt())
        .collect();

    let tol = LYAPUNOV_INCREASE_TOL * v_max.max(LYAPUNOV_NOISE_FLOOR);
    let lyapunov_increase_count = trace
        .samples
        .windows(2)
        .filter(|w| w[1].v - w[0].v > tol)
        .count();

    // Settling: last sample violating the band determines the settling time.
    let within = |s: &crate::sim::Sample| {
        (0..n).all(|i| (s.q[i] - s.q_d[i]).abs() <= settle_band)
    };
    let settling_time = match trace.samples.iter().rposition(|s| !within(s)) {
        None => Some(0.0),
        Some(k) if k + 1 < len => Some(trace.samples[k + 1].t),
        Some(_) => None,
    };

    Ok(MetricsReport {
        rms_error,
        rms_error_steady,
        settling_time,
        min_position_margin: min_pos_margin,
        min_velocity_margin: min_vel_margin,
        position_violations: pos_violations,
        velocity_violations: vel_violations,
        lyapunov_increase_count,
        max_eq14_residual: None,
        gains_valid: validate_gains(g).pass,
        diverged: trace.diverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::Variant;
    use crate::dynamics::PlanarChainModel;
    use crate::limits::JointState;
    use crate::sim::{simulate, ControlLaw, ControllerSelection, Integrator, SimConfig, SimTrace};
    use crate::trajectory::TrajectorySpec;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use nalgebra::{dvector, DMatrix};

    fn two_link_limits() -> LimitSet {
        LimitSet::from_degrees(
            &[-45.0, -90.0],
            &[90.0, 90.0],
            &[-90.0, -90.0],
            &[90.0, 180.0],
        )
        .unwrap()
    }

    fn valid_gains(n: usize) -> GainSet {
        GainSet::uniform(n, 50.0, 10.0, 5.0, Variant::Eq9)
    }

    fn equilibrium_trace(duration: f64, dt: f64) -> (SimTrace, PlanarChainModel, GainSet) {
        let model = PlanarChainModel::two_link_unit();
        let lim = two_link_limits();
        let q0 = dvector![0.2, -0.3];
        let spec = TrajectorySpec::Constant { target: q0.clone() };
        let gains = valid_gains(2);
        let selection = ControllerSelection {
            law: ControlLaw::Proposed,
            gains: gains.clone(),
        };
        let cfg = SimConfig {
            dt_physics: dt,
            dt_control: dt,
            duration,
            integrator: Integrator::Rk4,
            initial: JointState::new(q0, dvector![0.0, 0.0]).unwrap(),
            disturbances: vec![],
        };
        let trace = simulate(&model, &lim, &selection, &spec, &cfg).unwrap();
        (trace, model, gains)
    }

    #[test]
    fn lyapunov_zero_at_zero_error() {
        let g = valid_gains(2);
        let z = dvector![0.0, 0.0];
        assert_eq!(lyapunov_value(&z, &z, &g), 0.0);
    }

    #[test]
    fn lyapunov_scalar_example() {
        // n=1, k1=k2=1, k3=2, e_zeta=1, e_psi=-1: V = (1 - 2 + 2)/2 = 0.5.
        let g = GainSet::uniform(1, 1.0, 1.0, 2.0, Variant::Eq9);
        let v = lyapunov_value(&dvector![1.0], &dvector![-1.0], &g);
        assert_eq!(v, 0.5);
    }

    #[test]
    fn lyapunov_positive_for_valid_gains() {
        let g = valid_gains(2);
        let mut seed = 99u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for _ in 0..1000 {
            let e_zeta = dvector![next(), next()];
            let e_psi = dvector![next(), next()];
            if e_zeta.amax() < 1e-12 && e_psi.amax() < 1e-12 {
                continue;
            }
            assert!(lyapunov_value(&e_zeta, &e_psi, &g) > 0.0);
        }
    }

    #[test]
    fn lyapunov_matches_block_matrix_form() {
        let g = valid_gains(2);
        let e_zeta = dvector![0.7, -1.3];
        let e_psi = dvector![-0.2, 0.9];
        // Assemble P = [[k1, k2], [k2, k3]] explicitly.
        let n = 2;
        let mut p = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            p[(i, i)] = g.k1[i];
            p[(i, n + i)] = g.k2[i];
            p[(n + i, i)] = g.k2[i];
            p[(n + i, n + i)] = g.k3[i];
        }
        let mut e = DVector::zeros(2 * n);
        for i in 0..n {
            e[i] = e_zeta[i];
            e[n + i] = e_psi[i];
        }
        let quadratic = 0.5 * e.dot(&(&p * &e));
        assert_abs_diff_eq!(
            lyapunov_value(&e_zeta, &e_psi, &g),
            quadratic,
            epsilon = 1e-14
        );
    }

    #[test]
    fn equilibrium_metrics_are_clean() {
        let (trace, _, gains) = equilibrium_trace(1.0, 1e-3);
        let report = trace_metrics(&trace, &trace.lim.clone(), &gains, 1f64.to_radians()).unwrap();
        for i in 0..2 {
            assert!(report.rms_error[i] < 1e-9);
        }
        assert_eq!(report.settling_time, Some(0.0));
        assert_eq!(report.position_violations, 0);
        assert_eq!(report.velocity_violations, 0);
        assert_eq!(report.lyapunov_increase_count, 0);
        assert!(report.gains_valid);
        assert!(!report.diverged);
    }

    #[test]
    fn equilibrium_residual_near_zero() {
        let (trace, model, gains) = equilibrium_trace(0.5, 1e-4);
        let lim = trace.lim.clone();
        let report = error_dynamics_residual(&trace, &model, &lim, &gains).unwrap();
        assert!(report.reliable);
        assert!(
            report.max_residual < 1e-6,
            "residual {} on an equilibrium trace",
            report.max_residual
        );
    }

    #[test]
    fn corrupted_torque_inflates_second_line() {
        let (trace, model, gains) = equilibrium_trace(0.5, 1e-4);
        let lim = trace.lim.clone();
        let clean = error_dynamics_residual(&trace, &model, &lim, &gains).unwrap();
        let mut corrupted = trace.clone();
        for s in &mut corrupted.samples {
            s.tau *= 1.01;
        }
        let dirty = error_dynamics_residual(&corrupted, &model, &lim, &gains).unwrap();
        assert!(
            dirty.line2_max > clean.line2_max + 1e-3,
            "fault injection not detected: clean {} dirty {}",
            clean.line2_max,
            dirty.line2_max
        );
        // Line 1 does not involve the torque.
        assert_relative_eq!(dirty.line1_max, clean.line1_max, epsilon = 1e-12);
    }

    #[test]
    fn coarse_trace_flagged_unreliable() {
        let (trace, model, gains) = equilibrium_trace(1.0, 2e-3);
        let lim = trace.lim.clone();
        let report = error_dynamics_residual(&trace, &model, &lim, &gains).unwrap();
        assert!(!report.reliable);
    }

    #[test]
    fn margins_monotone_under_subsampling() {
        let model = PlanarChainModel::two_link_unit();
        let lim = two_link_limits();
        let spec = TrajectorySpec::Constant {
            target: dvector![87.5f64.to_radians(), (-87.5f64).to_radians()],
        };
        let gains = valid_gains(2);
        let selection = ControllerSelection {
            law: ControlLaw::Proposed,
            gains: gains.clone(),
        };
        let cfg = SimConfig {
            dt_physics: 1e-3,
            dt_control: 1e-3,
            duration: 3.0,
            integrator: Integrator::Rk4,
            initial: JointState::zeros(2),
            disturbances: vec![],
        };
        let full = simulate(&model, &lim, &selection, &spec, &cfg).unwrap();
        let mut sub = full.clone();
        sub.samples = full.samples.iter().step_by(4).cloned().collect();
        let m_full = trace_metrics(&full, &lim, &gains, 1f64.to_radians()).unwrap();
        let m_sub = trace_metrics(&sub, &lim, &gains, 1f64.to_radians()).unwrap();
        // A subsample examines a subset of instants, so its worst margins
        // cannot be worse than the full trace's.
        assert!(m_sub.min_position_margin >= m_full.min_position_margin - 1e-15);
        assert!(m_sub.min_velocity_margin >= m_full.min_velocity_margin - 1e-15);
        assert!(m_sub.position_violations <= m_full.position_violations);
        assert!(m_sub.velocity_violations <= m_full.velocity_violations);
    }
}
