//! One-to-one tanh parametrization between joint states and exogenous states.
//!
//! The feasible box is mapped through `q = q0 + delta_q * tanh(zeta)` and
//! `dq = dq0 + delta_dq * tanh(psi)`, so any finite exogenous state lands
//! strictly inside the limits. This module holds the map, its inverse
//! (strict and saturated), the diagonal Jacobians, and the regularized
//! reference `psi_r` with its analytic time derivative.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::limits::{check_dim, JointState, LimitSet, TransformedState};

/// Default interior margin for the saturated inverse transform.
///
/// The normalized offset is clamped to magnitude `1 - EPSILON_SAT` before
/// `atanh`, keeping the exogenous state finite when a measured state sits on
/// or past a bound.
pub const EPSILON_SAT: f64 = 1e-6;

/// Default exponent for the `psi_r` regularization.
pub const DEFAULT_P: f64 = 20.0;

/// How the inverse transform treats states at or beyond the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BackwardMode {
    /// Out-of-box input is an error naming the offending joint.
    Strict,
    /// Normalized offsets are clamped to `[-1 + eps, 1 - eps]` first.
    Saturated { eps: f64 },
}

impl BackwardMode {
    pub fn saturated() -> Self {
        BackwardMode::Saturated { eps: EPSILON_SAT }
    }
}

/// `sech^2(x) = 1 - tanh^2(x)`, computed without cancellation for large `x`.
#[inline]
pub(crate) fn sech2(x: f64) -> f64 {
    let s = 1.0 / x.cosh();
    s * s
}

/// Map an exogenous state to the joint state strictly inside the box.
pub fn forward_map(ts: &TransformedState, lim: &LimitSet) -> Result<JointState> {
    check_dim(lim.n(), ts.n())?;
    let q = &lim.q0 + lim.delta_q.component_mul(&ts.zeta.map(f64::tanh));
    let dq = &lim.dq0 + lim.delta_dq.component_mul(&ts.psi.map(f64::tanh));
    JointState::new(q, dq)
}

fn atanh_normalized(
    value: &DVector<f64>,
    center: &DVector<f64>,
    half_width: &DVector<f64>,
    bounds: impl Fn(usize) -> (f64, f64),
    mode: BackwardMode,
) -> Result<DVector<f64>> {
    let mut out = DVector::zeros(value.len());
    for i in 0..value.len() {
        let mut u = (value[i] - center[i]) / half_width[i];
        match mode {
            BackwardMode::Strict => {
                if u <= -1.0 || u >= 1.0 || !u.is_finite() {
                    let (lo, hi) = bounds(i);
                    return Err(Error::OutOfBox {
                        joint: i,
                        value: value[i],
                        lo,
                        hi,
                    });
                }
            }
            BackwardMode::Saturated { eps } => {
                u = u.clamp(-1.0 + eps, 1.0 - eps);
            }
        }
        out[i] = u.atanh();
    }
    Ok(out)
}

/// Map a joint state to its exogenous image.
///
/// In strict mode the state must be strictly interior; in saturated mode the
/// normalized offsets are clamped first, so the result is always finite.
pub fn backward_map(js: &JointState, lim: &LimitSet, mode: BackwardMode) -> Result<TransformedState> {
    check_dim(lim.n(), js.n())?;
    let zeta = atanh_normalized(
        &js.q,
        &lim.q0,
        &lim.delta_q,
        |i| (lim.q_min[i], lim.q_max[i]),
        mode,
    )?;
    let psi = atanh_normalized(
        &js.dq,
        &lim.dq0,
        &lim.delta_dq,
        |i| (lim.dq_min[i], lim.dq_max[i]),
        mode,
    )?;
    TransformedState::new(zeta, psi)
}

/// Diagonal Jacobians of the forward map, returned as vectors:
/// `J_zeta[i] = delta_q[i] * sech^2(zeta[i])` and
/// `J_psi[i] = delta_dq[i] * sech^2(psi[i])`.
pub fn jacobians(ts: &TransformedState, lim: &LimitSet) -> Result<(DVector<f64>, DVector<f64>)> {
    check_dim(lim.n(), ts.n())?;
    let j_zeta = DVector::from_fn(ts.n(), |i, _| lim.delta_q[i] * sech2(ts.zeta[i]));
    let j_psi = DVector::from_fn(ts.n(), |i, _| lim.delta_dq[i] * sech2(ts.psi[i]));
    Ok((j_zeta, j_psi))
}

/// Time derivatives of the diagonal Jacobians for given exogenous rates.
pub fn jacobian_rates(
    ts: &TransformedState,
    zeta_dot: &DVector<f64>,
    psi_dot: &DVector<f64>,
    lim: &LimitSet,
) -> Result<(DVector<f64>, DVector<f64>)> {
    check_dim(lim.n(), ts.n())?;
    check_dim(lim.n(), zeta_dot.len())?;
    check_dim(lim.n(), psi_dot.len())?;
    let jd_zeta = DVector::from_fn(ts.n(), |i, _| {
        -2.0 * lim.delta_q[i] * ts.zeta[i].tanh() * sech2(ts.zeta[i]) * zeta_dot[i]
    });
    let jd_psi = DVector::from_fn(ts.n(), |i, _| {
        -2.0 * lim.delta_dq[i] * ts.psi[i].tanh() * sech2(ts.psi[i]) * psi_dot[i]
    });
    Ok((jd_zeta, jd_psi))
}

/// Numeric cap on `|sigma|`: for huge `gamma` the exact value rounds to 1,
/// which would send `atanh` to infinity. `atanh(1 - 1e-15)` is about 17.9.
const SIGMA_MAX: f64 = 1.0 - 1e-15;

/// Unclamped magnitude of `sigma`; approaches 1 from below as `|g|` grows.
fn sigma_magnitude(g: f64, p: f64) -> f64 {
    let a = g.abs();
    if a == 0.0 {
        0.0
    } else if a <= 1.0 {
        a / (a.powf(p).ln_1p() / p).exp()
    } else {
        (-(1.0 / a).powf(p).ln_1p() / p).exp()
    }
}

/// `sigma(g) = g / (1 + |g|^p)^(1/p)`, strictly inside `(-1, 1)` for every
/// finite `g`. Evaluated through `1/|g|` for `|g| > 1` to avoid overflow,
/// and capped at [`SIGMA_MAX`] where the exact value is not representable
/// below 1.
fn sigma(g: f64, p: f64) -> f64 {
    g.signum() * sigma_magnitude(g, p).min(SIGMA_MAX)
}

/// `d sigma / d g = (1 + |g|^p)^(-(p+1)/p)`.
fn sigma_prime(g: f64, p: f64) -> f64 {
    let a = g.abs();
    if a <= 1.0 {
        (-(p + 1.0) * a.powf(p).ln_1p() / p).exp()
    } else {
        (-(p + 1.0) * (a.ln() + (1.0 / a).powf(p).ln_1p() / p)).exp()
    }
}

/// `1 - sigma(g)^2` without cancellation as `sigma` approaches 1.
fn one_minus_sigma_sq(g: f64, p: f64) -> f64 {
    let s = sigma(g, p).abs();
    if g.abs() <= 1.0 {
        1.0 - s * s
    } else {
        let one_minus_s = -(-(1.0 / g.abs()).powf(p).ln_1p() / p).exp_m1();
        one_minus_s * (1.0 + s)
    }
}

/// Raw argument of the reference map:
/// `gamma = delta_dq^-1 (J_zeta J_zeta_d^-1 (delta_dq tanh(psi_d) + dq0) - dq0)`.
pub fn gamma(
    zeta: &DVector<f64>,
    zeta_d: &DVector<f64>,
    psi_d: &DVector<f64>,
    lim: &LimitSet,
) -> Result<DVector<f64>> {
    let n = lim.n();
    check_dim(n, zeta.len())?;
    check_dim(n, zeta_d.len())?;
    check_dim(n, psi_d.len())?;
    Ok(DVector::from_fn(n, |i, _| {
        let ratio = sech2(zeta[i]) / sech2(zeta_d[i]);
        let v_d = lim.delta_dq[i] * psi_d[i].tanh() + lim.dq0[i];
        (ratio * v_d - lim.dq0[i]) / lim.delta_dq[i]
    }))
}

/// Reference exogenous velocity state, regularized so the `atanh` argument
/// always has magnitude below one:
/// `psi_r = atanh( gamma / (1 + |gamma|^p)^(1/p) )`.
pub fn psi_r(
    zeta: &DVector<f64>,
    zeta_d: &DVector<f64>,
    psi_d: &DVector<f64>,
    lim: &LimitSet,
    p: f64,
) -> Result<DVector<f64>> {
    let g = gamma(zeta, zeta_d, psi_d, lim)?;
    Ok(g.map(|gi| sigma(gi, p).atanh()))
}

/// Inputs needed by [`psi_r_dot`]; all rates are exogenous-state rates.
#[derive(Debug, Clone)]
pub struct PsiRInputs<'a> {
    pub zeta: &'a DVector<f64>,
    pub zeta_dot: &'a DVector<f64>,
    pub zeta_d: &'a DVector<f64>,
    pub zeta_d_dot: &'a DVector<f64>,
    pub psi_d: &'a DVector<f64>,
    pub psi_d_dot: &'a DVector<f64>,
}

/// Analytic time derivative of [`psi_r`] by the chain rule.
pub fn psi_r_dot(inputs: &PsiRInputs<'_>, lim: &LimitSet, p: f64) -> Result<DVector<f64>> {
    let n = lim.n();
    check_dim(n, inputs.zeta.len())?;
    check_dim(n, inputs.zeta_dot.len())?;
    check_dim(n, inputs.zeta_d.len())?;
    check_dim(n, inputs.zeta_d_dot.len())?;
    check_dim(n, inputs.psi_d.len())?;
    check_dim(n, inputs.psi_d_dot.len())?;
    Ok(DVector::from_fn(n, |i, _| {
        let (z, zd) = (inputs.zeta[i], inputs.zeta_d[i]);
        let j = lim.delta_q[i] * sech2(z);
        let j_d = lim.delta_q[i] * sech2(zd);
        let jdot = -2.0 * lim.delta_q[i] * z.tanh() * sech2(z) * inputs.zeta_dot[i];
        let jdot_d = -2.0 * lim.delta_q[i] * zd.tanh() * sech2(zd) * inputs.zeta_d_dot[i];
        let ratio = j / j_d;
        let ratio_dot = (jdot * j_d - j * jdot_d) / (j_d * j_d);
        let v_d = lim.delta_dq[i] * inputs.psi_d[i].tanh() + lim.dq0[i];
        let v_d_dot = lim.delta_dq[i] * sech2(inputs.psi_d[i]) * inputs.psi_d_dot[i];
        let g = (ratio * v_d - lim.dq0[i]) / lim.delta_dq[i];
        let g_dot = (ratio_dot * v_d + ratio * v_d_dot) / lim.delta_dq[i];
        // Where the cap pins psi_r, its derivative is zero by construction.
        if sigma_magnitude(g, p) >= SIGMA_MAX {
            0.0
        } else {
            sigma_prime(g, p) * g_dot / one_minus_sigma_sq(g, p)
        }
    }))
}
