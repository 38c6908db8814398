//! Closed-loop simulation: fixed-step integration of the manipulator under a
//! selected control law, with a zero-order-hold control period, optional
//! disturbance torque pulses, and full trace recording.

use nalgebra::DVector;

use crate::analysis::lyapunov_value;
use crate::controller::{
    baseline_computed_torque, control_torque, transformed_view, GainSet, PdGains,
};
use crate::dynamics::{forward_dynamics, PlanarChainModel};
use crate::error::{Error, Result};
use crate::limits::{check_dim, JointState, LimitSet};
use crate::trajectory::TrajectorySpec;

/// Any state component beyond this magnitude marks the run as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// Fixed-step integration scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Rk4,
    Heun,
}

/// Additive joint-torque pulse over `[t_start, t_end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisturbancePulse {
    pub t_start: f64,
    pub t_end: f64,
    pub torque: DVector<f64>,
}

/// Torque law driving the plant.
#[derive(Debug, Clone, PartialEq)]
pub enum ControlLaw {
    /// The limit-avoiding controller (variant taken from the gain set).
    Proposed,
    /// Computed-torque PD baseline without limit handling.
    Baseline(PdGains),
    /// No actuation; used for free-swing studies.
    Zero,
}

/// Control law plus the gain set. The gains always parameterize the
/// transformed view recorded in the trace (errors, `psi_r`, Lyapunov value),
/// even when the baseline or zero law drives the plant.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerSelection {
    pub law: ControlLaw,
    pub gains: GainSet,
}

/// Timing, integrator, initial state, and disturbances for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt_physics: f64,
    /// Control period; the torque is held between updates. Must be an
    /// integer multiple of `dt_physics`.
    pub dt_control: f64,
    pub duration: f64,
    pub integrator: Integrator,
    pub initial: JointState,
    pub disturbances: Vec<DisturbancePulse>,
}

impl SimConfig {
    /// Number of physics steps per control update, after validation.
    pub fn control_interval(&self) -> Result<usize> {
        if !self.dt_physics.is_finite() || self.dt_physics <= 0.0 {
            return Err(Error::Config {
                path: "sim.dt_physics".into(),
                message: format!("must be > 0, got {}", self.dt_physics),
            });
        }
        if self.dt_control < self.dt_physics {
            return Err(Error::Config {
                path: "sim.dt_control".into(),
                message: format!(
                    "must be >= sim.dt_physics ({}), got {}",
                    self.dt_physics, self.dt_control
                ),
            });
        }
        let ratio = self.dt_control / self.dt_physics;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return Err(Error::Config {
                path: "sim.dt_control".into(),
                message: format!(
                    "must be an integer multiple of sim.dt_physics, got ratio {ratio}"
                ),
            });
        }
        if !self.duration.is_finite() || self.duration <= 0.0 {
            return Err(Error::Config {
                path: "sim.duration".into(),
                message: format!("must be > 0, got {}", self.duration),
            });
        }
        Ok(ratio.round() as usize)
    }
}

/// One recorded instant of the closed loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub q: DVector<f64>,
    pub dq: DVector<f64>,
    pub q_d: DVector<f64>,
    pub dq_d: DVector<f64>,
    /// Torque acting on the plant over the step starting at `t`
    /// (held controller output plus any active disturbance).
    pub tau: DVector<f64>,
    pub zeta: DVector<f64>,
    pub psi: DVector<f64>,
    pub e_zeta: DVector<f64>,
    pub e_psi: DVector<f64>,
    /// Lyapunov value of the transformed errors under the selection's gains.
    pub v: f64,
}

/// Uniformly sampled record of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub samples: Vec<Sample>,
    pub lim: LimitSet,
    pub dt_physics: f64,
    pub dt_control: f64,
    pub diverged: bool,
    pub diverged_at: Option<f64>,
}

impl SimTrace {
    pub fn n(&self) -> usize {
        self.lim.n()
    }

    /// Normalized position margins `(q - q0)/delta_q` of sample `k`.
    pub fn margins_q(&self, k: usize) -> DVector<f64> {
        self.lim.normalized_q(&self.samples[k].q)
    }

    /// Normalized velocity margins `(dq - dq0)/delta_dq` of sample `k`.
    pub fn margins_dq(&self, k: usize) -> DVector<f64> {
        self.lim.normalized_dq(&self.samples[k].dq)
    }
}

fn accel(
    q: &DVector<f64>,
    dq: &DVector<f64>,
    tau: &DVector<f64>,
    model: &PlanarChainModel,
) -> Result<(DVector<f64>, DVector<f64>)> {
    Ok((dq.clone(), forward_dynamics(q, dq, tau, model)?))
}

fn step(
    integrator: Integrator,
    q: &DVector<f64>,
    dq: &DVector<f64>,
    tau: &DVector<f64>,
    model: &PlanarChainModel,
    h: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    match integrator {
        Integrator::Rk4 => {
            let (k1q, k1v) = accel(q, dq, tau, model)?;
            let (k2q, k2v) = accel(&(q + &k1q * (h / 2.0)), &(dq + &k1v * (h / 2.0)), tau, model)?;
            let (k3q, k3v) = accel(&(q + &k2q * (h / 2.0)), &(dq + &k2v * (h / 2.0)), tau, model)?;
            let (k4q, k4v) = accel(&(q + &k3q * h), &(dq + &k3v * h), tau, model)?;
            Ok((
                q + (k1q + k2q * 2.0 + k3q * 2.0 + k4q) * (h / 6.0),
                dq + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0),
            ))
        }
        Integrator::Heun => {
            let (k1q, k1v) = accel(q, dq, tau, model)?;
            let (k2q, k2v) = accel(&(q + &k1q * h), &(dq + &k1v * h), tau, model)?;
            Ok((
                q + (k1q + k2q) * (h / 2.0),
                dq + (k1v + k2v) * (h / 2.0),
            ))
        }
    }
}

fn state_ok(js: &JointState) -> bool {
    js.is_finite() && js.q.amax() <= DIVERGENCE_LIMIT && js.dq.amax() <= DIVERGENCE_LIMIT
}

fn disturbance_at(t: f64, pulses: &[DisturbancePulse], n: usize) -> DVector<f64> {
    let mut d = DVector::zeros(n);
    for p in pulses {
        if t >= p.t_start && t < p.t_end {
            d += &p.torque;
        }
    }
    d
}

/// Run the closed loop. The torque is recomputed every `dt_control`, held
/// between updates, and the plant is integrated at `dt_physics`. Divergence
/// (non-finite state, controller blow-up, or `|state| > 1e6`) ends the run
/// with a flagged trace instead of an error.
pub fn simulate(
    model: &PlanarChainModel,
    lim: &LimitSet,
    selection: &ControllerSelection,
    spec: &TrajectorySpec,
    cfg: &SimConfig,
) -> Result<SimTrace> {
    let n = model.n();
    check_dim(n, lim.n())?;
    check_dim(n, spec.n())?;
    check_dim(n, cfg.initial.n())?;
    for (i, p) in cfg.disturbances.iter().enumerate() {
        if p.torque.len() != n {
            return Err(Error::Config {
                path: format!("sim.disturbances[{i}].torque"),
                message: format!("has {} entries, expected {n}", p.torque.len()),
            });
        }
    }
    let every = cfg.control_interval()?;
    let steps = (cfg.duration / cfg.dt_physics).round() as usize;

    let mut js = cfg.initial.clone();
    let mut tau_held = DVector::zeros(n);
    let mut samples = Vec::with_capacity(steps + 1);
    let mut diverged = false;
    let mut diverged_at = None;

    for k in 0..=steps {
        let t = k as f64 * cfg.dt_physics;
        if !state_ok(&js) {
            diverged = true;
            diverged_at = Some(t);
            break;
        }
        let desired = spec.eval(t);

        // The transformed view is recorded for every law; only `Proposed`
        // also uses it to act.
        let mut controller_failed = false;
        if k % every == 0 {
            match &selection.law {
                ControlLaw::Proposed => {
                    match control_torque(&js, &desired, lim, &selection.gains, model) {
                        Ok(debug) => tau_held = debug.tau,
                        Err(Error::NonFinite { .. }) => controller_failed = true,
                        Err(e) => return Err(e),
                    }
                }
                ControlLaw::Baseline(pd) => {
                    tau_held = baseline_computed_torque(&js, &desired, pd, model)?;
                    if !tau_held.iter().all(|v| v.is_finite()) {
                        controller_failed = true;
                    }
                }
                ControlLaw::Zero => {}
            }
        }
        if controller_failed {
            diverged = true;
            diverged_at = Some(t);
            break;
        }

        let view = transformed_view(&js, &desired, lim, selection.gains.p, selection.gains.eps_sat)?;
        let v = lyapunov_value(&view.e_zeta, &view.e_psi, &selection.gains);
        let tau = &tau_held + disturbance_at(t, &cfg.disturbances, n);
        samples.push(Sample {
            t,
            q: js.q.clone(),
            dq: js.dq.clone(),
            q_d: desired.q.clone(),
            dq_d: desired.dq.clone(),
            tau: tau.clone(),
            zeta: view.state.zeta.clone(),
            psi: view.state.psi.clone(),
            e_zeta: view.e_zeta.clone(),
            e_psi: view.e_psi.clone(),
            v,
        });

        if k == steps {
            break;
        }
        let (q_next, dq_next) = step(cfg.integrator, &js.q, &js.dq, &tau, model, cfg.dt_physics)?;
        js = JointState::new(q_next, dq_next)?;
    }

    Ok(SimTrace {
        samples,
        lim: lim.clone(),
        dt_physics: cfg.dt_physics,
        dt_control: cfg.dt_control,
        diverged,
        diverged_at,
    })
}

/// Per-control-period summary produced by [`sweep_timestep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub dt_control: f64,
    /// Worst normalized velocity excursion beyond the box (0 when contained).
    pub max_velocity_overshoot: f64,
    /// Worst normalized position excursion beyond the box.
    pub max_position_overshoot: f64,
    /// Mean absolute per-step torque difference normalized by mean `|tau|`.
    pub torque_oscillation_index: f64,
    /// Final per-joint error within one degree of the target.
    pub converged: bool,
    pub diverged: bool,
}

/// Re-run one scenario over a list of control periods. When a requested
/// period is finer than the base physics step, the physics step is lowered
/// to match so the run stays well-posed.
pub fn sweep_timestep(
    model: &PlanarChainModel,
    lim: &LimitSet,
    selection: &ControllerSelection,
    spec: &TrajectorySpec,
    base: &SimConfig,
    dt_controls: &[f64],
) -> Result<Vec<SweepSummary>> {
    let mut out = Vec::with_capacity(dt_controls.len());
    for &dt in dt_controls {
        let mut cfg = base.clone();
        cfg.dt_control = dt;
        cfg.dt_physics = base.dt_physics.min(dt);
        let trace = simulate(model, lim, selection, spec, &cfg)?;
        out.push(summarize(&trace, spec));
    }
    Ok(out)
}

fn summarize(trace: &SimTrace, spec: &TrajectorySpec) -> SweepSummary {
    let mut max_vel = 0.0f64;
    let mut max_pos = 0.0f64;
    let mut diff_sum = 0.0;
    let mut diff_count = 0usize;
    let mut abs_sum = 0.0;
    let mut abs_count = 0usize;
    for k in 0..trace.samples.len() {
        max_vel = max_vel.max(trace.margins_dq(k).amax() - 1.0);
        max_pos = max_pos.max(trace.margins_q(k).amax() - 1.0);
        let tau = &trace.samples[k].tau;
        abs_sum += tau.iter().map(|v| v.abs()).sum::<f64>();
        abs_count += tau.len();
        if k + 1 < trace.samples.len() {
            let next = &trace.samples[k + 1].tau;
            diff_sum += (next - tau).iter().map(|v| v.abs()).sum::<f64>();
            diff_count += tau.len();
        }
    }
    let mean_abs = abs_sum / abs_count.max(1) as f64;
    let index = if mean_abs > 0.0 && diff_count > 0 {
        (diff_sum / diff_count as f64) / mean_abs
    } else {
        0.0
    };
    let converged = !trace.diverged
        && trace.samples.last().is_some_and(|s| {
            let target = spec.eval(s.t).q;
            (&s.q - target).amax() < 1f64.to_radians()
        });
    SweepSummary {
        dt_control: trace.dt_control,
        max_velocity_overshoot: max_vel.max(0.0),
        max_position_overshoot: max_pos.max(0.0),
        torque_oscillation_index: index,
        converged,
        diverged: trace.diverged,
    }
}
