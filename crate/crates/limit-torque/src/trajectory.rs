//! Desired-trajectory generators with analytic derivatives, plus a
//! feasibility audit against a limit set.

use nalgebra::DVector;

use crate::error::Result;
use crate::limits::{check_dim, LimitSet};

/// Desired joint trajectory, evaluated with exact first and second
/// derivatives. All values are radians internally.
#[derive(Debug, Clone, PartialEq)]
pub enum TrajectorySpec {
    /// Fixed target with zero derivatives.
    Constant { target: DVector<f64> },
    /// Per-joint `q_d = A sin(omega t + phase) + offset`.
    Sinusoid {
        amplitude: DVector<f64>,
        omega: DVector<f64>,
        phase: DVector<f64>,
        offset: DVector<f64>,
    },
}

/// One sample of the desired trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DesiredState {
    pub q: DVector<f64>,
    pub dq: DVector<f64>,
    pub ddq: DVector<f64>,
}

/// Worst-case distance of the sampled trajectory to the box boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Smallest per-joint position margin over the horizon (rad).
    pub position_margins: Vec<f64>,
    /// Smallest per-joint velocity margin over the horizon (rad/s).
    pub velocity_margins: Vec<f64>,
    pub min_position_margin: f64,
    pub min_velocity_margin: f64,
}

impl TrajectorySpec {
    pub fn n(&self) -> usize {
        match self {
            TrajectorySpec::Constant { target } => target.len(),
            TrajectorySpec::Sinusoid { amplitude, .. } => amplitude.len(),
        }
    }

    /// Evaluate position, velocity, and acceleration at time `t`.
    pub fn eval(&self, t: f64) -> DesiredState {
        match self {
            TrajectorySpec::Constant { target } => DesiredState {
                q: target.clone(),
                dq: DVector::zeros(target.len()),
                ddq: DVector::zeros(target.len()),
            },
            TrajectorySpec::Sinusoid {
                amplitude,
                omega,
                phase,
                offset,
            } => {
                let n = amplitude.len();
                let q = DVector::from_fn(n, |i, _| {
                    amplitude[i] * (omega[i] * t + phase[i]).sin() + offset[i]
                });
                let dq = DVector::from_fn(n, |i, _| {
                    amplitude[i] * omega[i] * (omega[i] * t + phase[i]).cos()
                });
                let ddq = DVector::from_fn(n, |i, _| {
                    -amplitude[i] * omega[i] * omega[i] * (omega[i] * t + phase[i]).sin()
                });
                DesiredState { q, dq, ddq }
            }
        }
    }

    /// Sample `[0, horizon]` at `dt_sample` and report worst-case margins.
    ///
    /// The trajectory is feasible when both overall margins are strictly
    /// positive; a target exactly on a bound counts as infeasible.
    pub fn audit_feasibility(
        &self,
        lim: &LimitSet,
        horizon: f64,
        dt_sample: f64,
    ) -> Result<FeasibilityReport> {
        check_dim(lim.n(), self.n())?;
        assert!(dt_sample > 0.0, "dt_sample must be positive");
        let n = lim.n();
        let mut pos = vec![f64::INFINITY; n];
        let mut vel = vec![f64::INFINITY; n];
        let steps = (horizon / dt_sample).ceil() as usize;
        for k in 0..=steps {
            let t = (k as f64 * dt_sample).min(horizon);
            let d = self.eval(t);
            for i in 0..n {
                pos[i] = pos[i]
                    .min(d.q[i] - lim.q_min[i])
                    .min(lim.q_max[i] - d.q[i]);
                vel[i] = vel[i]
                    .min(d.dq[i] - lim.dq_min[i])
                    .min(lim.dq_max[i] - d.dq[i]);
            }
        }
        let min_pos = pos.iter().cloned().fold(f64::INFINITY, f64::min);
        let min_vel = vel.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(FeasibilityReport {
            feasible: min_pos > 0.0 && min_vel > 0.0,
            position_margins: pos,
            velocity_margins: vel,
            min_position_margin: min_pos,
            min_velocity_margin: min_vel,
        })
    }
}
