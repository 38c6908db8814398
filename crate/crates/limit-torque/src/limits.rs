//! Feasible-box data for joint positions and velocities.
//!
//! A [`LimitSet`] stores the open box `q_min < q < q_max`,
//! `dq_min < dq < dq_max` together with its midpoints and half-widths,
//! which every transform in [`crate::param`] is expressed through.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Clamp a scalar into `[lo, hi]`.
///
/// Rejects malformed bounds (`lo > hi`) instead of silently swapping them.
pub fn sat(x: f64, lo: f64, hi: f64) -> Result<f64> {
    if lo > hi {
        return Err(Error::InvalidBounds { joint: 0, lo, hi });
    }
    Ok(x.clamp(lo, hi))
}

/// Elementwise [`sat`] over vectors of equal length.
pub fn sat_vec(x: &DVector<f64>, lo: &DVector<f64>, hi: &DVector<f64>) -> Result<DVector<f64>> {
    check_dim(lo.len(), x.len())?;
    check_dim(hi.len(), x.len())?;
    let mut out = x.clone();
    for i in 0..x.len() {
        if lo[i] > hi[i] {
            return Err(Error::InvalidBounds {
                joint: i,
                lo: lo[i],
                hi: hi[i],
            });
        }
        out[i] = x[i].clamp(lo[i], hi[i]);
    }
    Ok(out)
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Joint positions and velocities, in radians and radians/second.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub q: DVector<f64>,
    pub dq: DVector<f64>,
}

impl JointState {
    pub fn new(q: DVector<f64>, dq: DVector<f64>) -> Result<Self> {
        check_dim(q.len(), dq.len())?;
        Ok(Self { q, dq })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            q: DVector::zeros(n),
            dq: DVector::zeros(n),
        }
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn is_finite(&self) -> bool {
        self.q.iter().all(|v| v.is_finite()) && self.dq.iter().all(|v| v.is_finite())
    }
}

/// Exogenous image of a joint state under the tanh parametrization.
///
/// Any finite `(zeta, psi)` maps to a state strictly inside the box.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedState {
    pub zeta: DVector<f64>,
    pub psi: DVector<f64>,
}

impl TransformedState {
    pub fn new(zeta: DVector<f64>, psi: DVector<f64>) -> Result<Self> {
        check_dim(zeta.len(), psi.len())?;
        Ok(Self { zeta, psi })
    }

    pub fn n(&self) -> usize {
        self.zeta.len()
    }

    pub fn is_finite(&self) -> bool {
        self.zeta.iter().all(|v| v.is_finite()) && self.psi.iter().all(|v| v.is_finite())
    }
}

/// Per-joint position and velocity box with derived midpoints and half-widths.
///
/// Construction enforces a non-empty interior on every joint; the derived
/// quantities satisfy `q = q0 ± delta_q` at the bounds by definition.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitSet {
    pub q_min: DVector<f64>,
    pub q_max: DVector<f64>,
    pub dq_min: DVector<f64>,
    pub dq_max: DVector<f64>,
    /// Midpoint of the position box, `(q_max + q_min) / 2`.
    pub q0: DVector<f64>,
    /// Midpoint of the velocity box, `(dq_max + dq_min) / 2`.
    pub dq0: DVector<f64>,
    /// Half-width of the position box, `(q_max - q_min) / 2`.
    pub delta_q: DVector<f64>,
    /// Half-width of the velocity box, `(dq_max - dq_min) / 2`.
    pub delta_dq: DVector<f64>,
}

impl LimitSet {
    /// Build a limit set from bounds in radians and radians/second.
    pub fn new(
        q_min: DVector<f64>,
        q_max: DVector<f64>,
        dq_min: DVector<f64>,
        dq_max: DVector<f64>,
    ) -> Result<Self> {
        let n = q_min.len();
        check_dim(n, q_max.len())?;
        check_dim(n, dq_min.len())?;
        check_dim(n, dq_max.len())?;
        for i in 0..n {
            for (lo, hi) in [(q_min[i], q_max[i]), (dq_min[i], dq_max[i])] {
                if !(lo.is_finite() && hi.is_finite()) || hi - lo <= 0.0 {
                    return Err(Error::InvalidBounds { joint: i, lo, hi });
                }
            }
        }
        let q0 = (&q_max + &q_min) / 2.0;
        let dq0 = (&dq_max + &dq_min) / 2.0;
        let delta_q = (&q_max - &q_min) / 2.0;
        let delta_dq = (&dq_max - &dq_min) / 2.0;
        Ok(Self {
            q_min,
            q_max,
            dq_min,
            dq_max,
            q0,
            dq0,
            delta_q,
            delta_dq,
        })
    }

    /// Bounds given in degrees and degrees/second.
    pub fn from_degrees(
        q_min: &[f64],
        q_max: &[f64],
        dq_min: &[f64],
        dq_max: &[f64],
    ) -> Result<Self> {
        let to_rad = |v: &[f64]| DVector::from_iterator(v.len(), v.iter().map(|d| d.to_radians()));
        Self::new(to_rad(q_min), to_rad(q_max), to_rad(dq_min), to_rad(dq_max))
    }

    pub fn n(&self) -> usize {
        self.q_min.len()
    }

    /// Index of the first joint whose position or velocity is not strictly
    /// inside the box, if any.
    pub fn first_violation(&self, js: &JointState) -> Option<usize> {
        (0..self.n()).find(|&i| {
            !(self.q_min[i] < js.q[i]
                && js.q[i] < self.q_max[i]
                && self.dq_min[i] < js.dq[i]
                && js.dq[i] < self.dq_max[i])
        })
    }

    /// True when the state is strictly inside both boxes.
    pub fn contains(&self, js: &JointState) -> bool {
        self.first_violation(js).is_none()
    }

    /// Normalized position offsets `(q - q0) / delta_q`, in `(-1, 1)` for
    /// interior states.
    pub fn normalized_q(&self, q: &DVector<f64>) -> DVector<f64> {
        (q - &self.q0).component_div(&self.delta_q)
    }

    /// Normalized velocity offsets `(dq - dq0) / delta_dq`.
    pub fn normalized_dq(&self, dq: &DVector<f64>) -> DVector<f64> {
        (dq - &self.dq0).component_div(&self.delta_dq)
    }
}
