//! Limit-avoiding torque law, its discrete-friendly variant, gain
//! validation, and a plain computed-torque baseline used for contrast.
//!
//! The baseline deliberately ignores the limits; it exists so experiments
//! can show what the transformed controller buys.

use nalgebra::DVector;

use crate::dynamics::{dyn_terms, PlanarChainModel};
use crate::error::{Error, Result};
use crate::limits::{check_dim, JointState, LimitSet, TransformedState};
use crate::param::{
    backward_map, forward_map, jacobians, psi_r, psi_r_dot, BackwardMode, PsiRInputs, DEFAULT_P,
    EPSILON_SAT,
};
use crate::trajectory::DesiredState;

/// Which torque law the controller applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Continuous-time law: the error feedback ends in `k3 e_psi`.
    Eq9,
    /// Discrete-friendly reshaping: `k3 J_psi^-1 e_psi` instead.
    Eq10,
}

/// Diagonal gains plus the regularization exponent and saturation margin.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSet {
    pub k1: DVector<f64>,
    pub k2: DVector<f64>,
    pub k3: DVector<f64>,
    /// Exponent of the `psi_r` regularization.
    pub p: f64,
    /// Interior margin for the saturated inverse transforms.
    pub eps_sat: f64,
    pub variant: Variant,
}

impl GainSet {
    pub fn new(k1: DVector<f64>, k2: DVector<f64>, k3: DVector<f64>, variant: Variant) -> Self {
        Self {
            k1,
            k2,
            k3,
            p: DEFAULT_P,
            eps_sat: EPSILON_SAT,
            variant,
        }
    }

    pub fn uniform(n: usize, k1: f64, k2: f64, k3: f64, variant: Variant) -> Self {
        Self::new(
            DVector::from_element(n, k1),
            DVector::from_element(n, k2),
            DVector::from_element(n, k3),
            variant,
        )
    }

    pub fn n(&self) -> usize {
        self.k1.len()
    }
}

/// Outcome of the gain conditions: positivity of every diagonal entry and
/// a positive Schur margin `k3 - k2^2 / k1` per joint.
#[derive(Debug, Clone, PartialEq)]
pub struct GainReport {
    pub pass: bool,
    /// Per-joint `k3[i] - k2[i]^2 / k1[i]`.
    pub schur_margins: Vec<f64>,
    /// Human-readable findings for entries that fail.
    pub issues: Vec<String>,
}

/// Check the stability preconditions on a gain set.
pub fn validate_gains(g: &GainSet) -> GainReport {
    let n = g.n();
    let mut issues = Vec::new();
    for (name, v) in [("k1", &g.k1), ("k2", &g.k2), ("k3", &g.k3)] {
        if v.len() != n {
            issues.push(format!("{name} has {} entries, expected {n}", v.len()));
        }
        for (i, &x) in v.iter().enumerate() {
            if !x.is_finite() {
                issues.push(format!("{name}[{i}] is not finite"));
            } else if x <= 0.0 {
                issues.push(format!("{name}[{i}] = {x} is not positive"));
            }
        }
    }
    let mut margins = Vec::with_capacity(n);
    for i in 0..n {
        let margin = if g.k2.len() == n && g.k3.len() == n {
            g.k3[i] - g.k2[i] * g.k2[i] / g.k1[i]
        } else {
            f64::NAN
        };
        margins.push(margin);
        if margin.is_nan() || margin <= 0.0 {
            issues.push(format!("schur margin at joint {i} is {margin}, must be > 0"));
        }
    }
    GainReport {
        pass: issues.is_empty(),
        schur_margins: margins,
        issues,
    }
}

/// Coriolis-plus-gravity bias of the transformed dynamics,
/// `h = C(q, dq) dq + G(q)`.
pub fn transformed_bias(
    q: &DVector<f64>,
    dq: &DVector<f64>,
    model: &PlanarChainModel,
) -> Result<DVector<f64>> {
    let terms = dyn_terms(q, dq, model)?;
    Ok(&terms.coriolis * dq + terms.gravity)
}

/// The controller's transformed picture of one instant: saturated state and
/// desired images, errors, and the reference `psi_r`.
#[derive(Debug, Clone)]
pub struct TransformedView {
    pub state: TransformedState,
    pub desired: TransformedState,
    /// Desired velocity after the saturation of the desired trajectory.
    pub dq_d_sat: DVector<f64>,
    pub e_zeta: DVector<f64>,
    pub psi_r: DVector<f64>,
    pub e_psi: DVector<f64>,
}

/// Build the transformed view for any control law (the trace records it
/// even when the baseline is driving the plant).
pub fn transformed_view(
    js: &JointState,
    desired: &DesiredState,
    lim: &LimitSet,
    p: f64,
    eps_sat: f64,
) -> Result<TransformedView> {
    check_dim(lim.n(), js.n())?;
    let mode = BackwardMode::Saturated { eps: eps_sat };
    let state = backward_map(js, lim, mode)?;
    let desired_js = JointState::new(desired.q.clone(), desired.dq.clone())?;
    let desired_ts = backward_map(&desired_js, lim, mode)?;
    // The saturated desired velocity is what the reference map sees.
    let dq_d_sat = forward_map(&desired_ts, lim)?.dq;
    let e_zeta = &state.zeta - &desired_ts.zeta;
    let r = psi_r(&state.zeta, &desired_ts.zeta, &desired_ts.psi, lim, p)?;
    let e_psi = &state.psi - &r;
    Ok(TransformedView {
        state,
        desired: desired_ts,
        dq_d_sat,
        e_zeta,
        psi_r: r,
        e_psi,
    })
}

/// Everything the torque law computed on the way to `tau`.
#[derive(Debug, Clone)]
pub struct ControlDebug {
    pub e_zeta: DVector<f64>,
    pub e_psi: DVector<f64>,
    pub psi_r: DVector<f64>,
    pub psi_r_dot: DVector<f64>,
    pub h_zeta_psi: DVector<f64>,
    pub tau: DVector<f64>,
    pub view: TransformedView,
}

fn ensure_finite(v: &DVector<f64>, term: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { term })
    }
}

/// Limit-avoiding torque:
/// `tau = h + M J_psi (psi_r_dot - k2^-1 k1 e_zeta_dot - k2 e_zeta - K e_psi)`
/// with `K = k3` for [`Variant::Eq9`] and `K = k3 J_psi^-1` for
/// [`Variant::Eq10`].
pub fn control_torque(
    js: &JointState,
    desired: &DesiredState,
    lim: &LimitSet,
    gains: &GainSet,
    model: &PlanarChainModel,
) -> Result<ControlDebug> {
    let n = lim.n();
    check_dim(n, js.n())?;
    check_dim(n, gains.n())?;
    check_dim(n, model.n())?;
    if !js.is_finite() {
        return Err(Error::NonFinite { term: "joint state" });
    }
    let view = transformed_view(js, desired, lim, gains.p, gains.eps_sat)?;
    ensure_finite(&view.psi_r, "psi_r")?;

    let (j_zeta, j_psi) = jacobians(&view.state, lim)?;
    let (j_zeta_d, j_psi_d) = jacobians(&view.desired, lim)?;

    // Exogenous rates from the kinematic identities.
    let zeta_dot = js.dq.component_div(&j_zeta);
    let zeta_d_dot = view.dq_d_sat.component_div(&j_zeta_d);
    let psi_d_dot = desired.ddq.component_div(&j_psi_d);
    ensure_finite(&zeta_dot, "zeta_dot")?;
    ensure_finite(&zeta_d_dot, "zeta_d_dot")?;
    ensure_finite(&psi_d_dot, "psi_d_dot")?;

    let r_dot = psi_r_dot(
        &PsiRInputs {
            zeta: &view.state.zeta,
            zeta_dot: &zeta_dot,
            zeta_d: &view.desired.zeta,
            zeta_d_dot: &zeta_d_dot,
            psi_d: &view.desired.psi,
            psi_d_dot: &psi_d_dot,
        },
        lim,
        gains.p,
    )?;
    ensure_finite(&r_dot, "psi_r_dot")?;

    let e_zeta_dot = &zeta_dot - &zeta_d_dot;
    let mut u = DVector::zeros(n);
    for i in 0..n {
        let feedback = match gains.variant {
            Variant::Eq9 => gains.k3[i] * view.e_psi[i],
            Variant::Eq10 => gains.k3[i] * view.e_psi[i] / j_psi[i],
        };
        u[i] = r_dot[i]
            - gains.k1[i] / gains.k2[i] * e_zeta_dot[i]
            - gains.k2[i] * view.e_zeta[i]
            - feedback;
    }
    ensure_finite(&u, "transformed input")?;

    // Dynamics terms at the saturated image of the state.
    let recon = forward_map(&view.state, lim)?;
    let h = transformed_bias(&recon.q, &recon.dq, model)?;
    let mass = model.mass_matrix(&recon.q);
    let tau = &h + &mass * j_psi.component_mul(&u);
    ensure_finite(&tau, "tau")?;

    Ok(ControlDebug {
        e_zeta: view.e_zeta.clone(),
        e_psi: view.e_psi.clone(),
        psi_r: view.psi_r.clone(),
        psi_r_dot: r_dot,
        h_zeta_psi: h,
        tau,
        view,
    })
}

/// PD gains for the computed-torque baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct PdGains {
    pub kp: DVector<f64>,
    pub kd: DVector<f64>,
}

/// Computed-torque tracking law without any limit handling:
/// `tau = C dq + G + M (ddq_d - kd (dq - dq_d) - kp (q - q_d))`.
pub fn baseline_computed_torque(
    js: &JointState,
    desired: &DesiredState,
    pd: &PdGains,
    model: &PlanarChainModel,
) -> Result<DVector<f64>> {
    let n = model.n();
    check_dim(n, js.n())?;
    check_dim(n, pd.kp.len())?;
    check_dim(n, pd.kd.len())?;
    let terms = dyn_terms(&js.q, &js.dq, model)?;
    let v = &desired.ddq
        - pd.kd.component_mul(&(&js.dq - &desired.dq))
        - pd.kp.component_mul(&(&js.q - &desired.q));
    Ok(&terms.coriolis * &js.dq + &terms.gravity + &terms.mass * v)
}
