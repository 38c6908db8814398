//! Rigid-body dynamics of planar serial manipulators with revolute joints.
//!
//! Joint angles are relative; link 1's absolute angle is measured from the
//! +x axis. Gravity is an arbitrary in-plane vector so vertical-plane and
//! gravity-free setups share one code path. The Coriolis matrix uses the
//! Christoffel construction, which makes `dM/dt - 2C` skew-symmetric.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::limits::check_dim;

/// Physical parameters of an n-link planar serial chain.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarChainModel {
    /// Link masses (kg).
    pub masses: Vec<f64>,
    /// Link lengths, joint to joint (m).
    pub lengths: Vec<f64>,
    /// Distance from each joint to its link's center of mass (m).
    pub com_offsets: Vec<f64>,
    /// Out-of-plane rotational inertia about each center of mass (kg m^2).
    pub inertias: Vec<f64>,
    /// In-plane gravitational acceleration (m/s^2).
    pub gravity: [f64; 2],
}

impl PlanarChainModel {
    pub fn new(
        masses: Vec<f64>,
        lengths: Vec<f64>,
        com_offsets: Vec<f64>,
        inertias: Vec<f64>,
        gravity: [f64; 2],
    ) -> Result<Self> {
        let n = masses.len();
        if n == 0 {
            return Err(Error::InvalidModel("chain needs at least one link".into()));
        }
        for (name, v) in [
            ("lengths", &lengths),
            ("com_offsets", &com_offsets),
            ("inertias", &inertias),
        ] {
            if v.len() != n {
                return Err(Error::InvalidModel(format!(
                    "{name} has {} entries, expected {n}",
                    v.len()
                )));
            }
        }
        for i in 0..n {
            if !masses[i].is_finite() || masses[i] <= 0.0 {
                return Err(Error::InvalidModel(format!("mass {i} must be > 0")));
            }
            if !lengths[i].is_finite() || lengths[i] <= 0.0 {
                return Err(Error::InvalidModel(format!("length {i} must be > 0")));
            }
            if !(0.0..=lengths[i]).contains(&com_offsets[i]) {
                return Err(Error::InvalidModel(format!(
                    "com_offset {i} must lie in [0, length]"
                )));
            }
            if inertias[i] < 0.0 {
                return Err(Error::InvalidModel(format!("inertia {i} must be >= 0")));
            }
        }
        Ok(Self {
            masses,
            lengths,
            com_offsets,
            inertias,
            gravity,
        })
    }

    /// Uniform thin rods: COM at mid-link, inertia `m l^2 / 12`.
    pub fn uniform_rods(masses: &[f64], lengths: &[f64], gravity: [f64; 2]) -> Result<Self> {
        let com: Vec<f64> = lengths.iter().map(|l| l / 2.0).collect();
        let inertia: Vec<f64> = masses
            .iter()
            .zip(lengths)
            .map(|(m, l)| m * l * l / 12.0)
            .collect();
        Self::new(masses.to_vec(), lengths.to_vec(), com, inertia, gravity)
    }

    /// Canonical two-link benchmark: unit rods in the vertical plane.
    pub fn two_link_unit() -> Self {
        Self::uniform_rods(&[1.0, 1.0], &[1.0, 1.0], [0.0, -9.81]).unwrap()
    }

    pub fn n(&self) -> usize {
        self.masses.len()
    }

    /// Same chain with gravity removed.
    pub fn without_gravity(&self) -> Self {
        let mut m = self.clone();
        m.gravity = [0.0, 0.0];
        m
    }

    /// Reach coefficient: distance from joint `a` contributing to link `k`'s
    /// center of mass (full length below the COM link, COM offset on it).
    #[inline]
    fn reach(&self, k: usize, a: usize) -> f64 {
        if a < k {
            self.lengths[a]
        } else {
            self.com_offsets[k]
        }
    }

    fn cumulative_angles(&self, q: &DVector<f64>) -> Vec<f64> {
        let mut theta = vec![0.0; self.n()];
        let mut acc = 0.0;
        for (i, th) in theta.iter_mut().enumerate() {
            acc += q[i];
            *th = acc;
        }
        theta
    }

    /// Planar positions of every link's center of mass.
    pub fn com_positions(&self, q: &DVector<f64>) -> Vec<[f64; 2]> {
        let theta = self.cumulative_angles(q);
        let mut out = Vec::with_capacity(self.n());
        let (mut x, mut y) = (0.0, 0.0);
        for (k, &th) in theta.iter().enumerate() {
            out.push([
                x + self.com_offsets[k] * th.cos(),
                y + self.com_offsets[k] * th.sin(),
            ]);
            x += self.lengths[k] * th.cos();
            y += self.lengths[k] * th.sin();
        }
        out
    }

    /// Mass matrix from the COM Jacobians:
    /// `M_ij = sum_k m_k (dr_k/dq_i . dr_k/dq_j) + I_k [i,j <= k]`,
    /// with `dr_k/dq_i . dr_k/dq_j` expanded in cosine-difference form.
    pub fn mass_matrix(&self, q: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n();
        let theta = self.cumulative_angles(q);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for k in j..n {
                    let mut s = 0.0;
                    for a in i..=k {
                        for b in j..=k {
                            s += self.reach(k, a)
                                * self.reach(k, b)
                                * (theta[a] - theta[b]).cos();
                        }
                    }
                    acc += self.masses[k] * s + self.inertias[k];
                }
                m[(i, j)] = acc;
                m[(j, i)] = acc;
            }
        }
        m
    }

    /// Partial derivative of the mass matrix with respect to `q_r`.
    fn mass_matrix_partial(&self, q: &DVector<f64>, r: usize) -> DMatrix<f64> {
        let n = self.n();
        let theta = self.cumulative_angles(q);
        let mut dm = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for k in j..n {
                    let mut s = 0.0;
                    for a in i..=k {
                        for b in j..=k {
                            // d theta_a / d q_r = [r <= a]
                            let w = (r <= a) as i32 - (r <= b) as i32;
                            if w != 0 {
                                s -= w as f64
                                    * self.reach(k, a)
                                    * self.reach(k, b)
                                    * (theta[a] - theta[b]).sin();
                            }
                        }
                    }
                    acc += self.masses[k] * s;
                }
                dm[(i, j)] = acc;
                dm[(j, i)] = acc;
            }
        }
        dm
    }

    /// Gravity torque vector, the gradient of the potential energy.
    pub fn gravity_vector(&self, q: &DVector<f64>) -> DVector<f64> {
        let n = self.n();
        let theta = self.cumulative_angles(q);
        let [gx, gy] = self.gravity;
        let mut g = DVector::zeros(n);
        for i in 0..n {
            let mut acc = 0.0;
            for k in i..n {
                let mut s = 0.0;
                for (a, &th) in theta.iter().enumerate().take(k + 1).skip(i) {
                    s += self.reach(k, a) * (-gx * th.sin() + gy * th.cos());
                }
                acc -= self.masses[k] * s;
            }
            g[i] = acc;
        }
        g
    }

    /// Potential energy, `-sum_k m_k g . r_k`, zero when every COM sits at
    /// the base-joint level along the gravity axis.
    pub fn potential_energy(&self, q: &DVector<f64>) -> f64 {
        let [gx, gy] = self.gravity;
        self.com_positions(q)
            .iter()
            .zip(&self.masses)
            .map(|([x, y], m)| -m * (gx * x + gy * y))
            .sum()
    }
}

/// Closed-form dynamics terms at one state.
#[derive(Debug, Clone, PartialEq)]
pub struct DynTerms {
    /// Symmetric positive definite mass matrix.
    pub mass: DMatrix<f64>,
    /// Coriolis/centrifugal matrix in the Christoffel convention.
    pub coriolis: DMatrix<f64>,
    /// Gravity torque vector.
    pub gravity: DVector<f64>,
}

/// Evaluate `M(q)`, `C(q, dq)`, and `G(q)`.
pub fn dyn_terms(q: &DVector<f64>, dq: &DVector<f64>, model: &PlanarChainModel) -> Result<DynTerms> {
    let n = model.n();
    check_dim(n, q.len())?;
    check_dim(n, dq.len())?;
    let mass = model.mass_matrix(q);
    let partials: Vec<DMatrix<f64>> = (0..n).map(|r| model.mass_matrix_partial(q, r)).collect();
    let mut coriolis = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for r in 0..n {
                // Christoffel symbols of the first kind.
                acc += 0.5
                    * (partials[r][(i, j)] + partials[j][(i, r)] - partials[i][(r, j)])
                    * dq[r];
            }
            coriolis[(i, j)] = acc;
        }
    }
    Ok(DynTerms {
        mass,
        coriolis,
        gravity: model.gravity_vector(q),
    })
}

/// Joint accelerations `qdd = M^-1 (tau - C dq - G)`.
pub fn forward_dynamics(
    q: &DVector<f64>,
    dq: &DVector<f64>,
    tau: &DVector<f64>,
    model: &PlanarChainModel,
) -> Result<DVector<f64>> {
    check_dim(model.n(), tau.len())?;
    let terms = dyn_terms(q, dq, model)?;
    let rhs = tau - &terms.coriolis * dq - &terms.gravity;
    terms
        .mass
        .cholesky()
        .map(|chol| chol.solve(&rhs))
        .ok_or(Error::SingularMassMatrix)
}

/// Kinetic and potential energy at a state.
pub fn energy(q: &DVector<f64>, dq: &DVector<f64>, model: &PlanarChainModel) -> Result<(f64, f64)> {
    check_dim(model.n(), q.len())?;
    check_dim(model.n(), dq.len())?;
    let m = model.mass_matrix(q);
    let kinetic = 0.5 * dq.dot(&(&m * dq));
    Ok((kinetic, model.potential_energy(q)))
}
