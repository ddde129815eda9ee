//! Chern, Bismut, and Levi-Civita connections under a unitary coframe.
//!
//! Conventions (all matrices act on the frame row-wise, `∇e_i = Σ_j θ_{ij} e_j`):
//!
//! * Chern: `dφ = −ᵗθ ∧ φ + τ` with `θ` skew-Hermitian and `τ` pure `(2,0)`.
//!   The `(0,1)` entries of `θ` are read off from the `(1,1)` part of `dφ`,
//!   the `(1,0)` entries follow by skew-Hermitian symmetry, and the computed
//!   `τ` is verified to be `(2,0)`.
//! * Torsion components: `τ_k = Σ_{i,j} T^k_{ij} φ_i ∧ φ_j` with `T`
//!   antisymmetric, so the canonical coefficient of `φ_i ∧ φ_j` (`i < j`)
//!   is `2 T^k_{ij}`.
//! * `γ_{ij} = Σ_k (T^j_{ik} φ_k − conj(T^i_{jk}) φ̄_k)` and
//!   `(θ_2)_{ij} = Σ_k conj(T^k_{ij}) φ_k`; Bismut `θ^b = θ + 2γ`;
//!   the `(1,0)`-block of Levi-Civita is `θ_1 = θ + γ`.

use crate::form::{Form, FormMatrix};
use crate::structure::LieHermitianStructure;
use crate::tensors::Torsion;
use crate::{Cx, Error, Result};

#[derive(Debug, Clone)]
pub struct ConnectionBundle {
    n: usize,
    pub theta: FormMatrix,
    pub tau: Vec<Form>,
    pub torsion: Torsion,
    pub gamma: FormMatrix,
    pub theta2: FormMatrix,
    pub theta_b: FormMatrix,
    pub theta1: FormMatrix,
}

impl ConnectionBundle {
    /// Solve for the Chern connection and torsion, then assemble the derived
    /// connection matrices.
    pub fn new(s: &LieHermitianStructure) -> Result<Self> {
        let n = s.n();
        let theta = FormMatrix::from_fn(n, n, n, |i, j| {
            let mut entry = Form::zero(n);
            for q in 0..n {
                let hol = Form::monomial(n, &[(q, false)], -s.d_coeff(i, j, q).conj())
                    .expect("index in range");
                let anti = Form::monomial(n, &[(q, true)], s.d_coeff(j, i, q))
                    .expect("index in range");
                entry = &(&entry + &hol) + &anti;
            }
            entry
        });

        let mut tau = Vec::with_capacity(n);
        for j in 0..n {
            let mut t = s.dphi(j).clone();
            for i in 0..n {
                let phi_i = Form::generator(n, i, false)?;
                t = &t + &theta.get(i, j).wedge(&phi_i);
            }
            let off = t.bidegree_part(1, 1).norm_inf().max(t.bidegree_part(0, 2).norm_inf());
            if off > 1e-10 {
                return Err(Error::Internal(format!(
                    "Chern torsion τ_{} has non-(2,0) residual {:.3e}",
                    j + 1,
                    off
                )));
            }
            tau.push(t.bidegree_part(2, 0));
        }

        let mut torsion = Torsion::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in (i + 1)..n {
                    let c = tau[k].coeff(&[(i, false), (j, false)]) * 0.5;
                    torsion.set(k, i, j, c);
                }
            }
        }

        let gamma = FormMatrix::from_fn(n, n, n, |i, j| {
            let mut entry = Form::zero(n);
            for k in 0..n {
                let hol = Form::monomial(n, &[(k, false)], torsion.t(j, i, k))
                    .expect("index in range");
                let anti = Form::monomial(n, &[(k, true)], -torsion.t(i, j, k).conj())
                    .expect("index in range");
                entry = &(&entry + &hol) + &anti;
            }
            entry
        });
        let theta2 = FormMatrix::from_fn(n, n, n, |i, j| {
            let mut entry = Form::zero(n);
            for k in 0..n {
                let hol = Form::monomial(n, &[(k, false)], torsion.t(k, i, j).conj())
                    .expect("index in range");
                entry = &entry + &hol;
            }
            entry
        });
        let theta_b = theta.add(&gamma.scaled(Cx::new(2.0, 0.0)));
        let theta1 = theta.add(&gamma);

        Ok(ConnectionBundle { n, theta, tau, torsion, gamma, theta2, theta_b, theta1 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The t-Gauduchon connection `θ^t = (1−t) θ + t θ^b`.
    pub fn gauduchon_theta(&self, t: f64) -> FormMatrix {
        self.theta
            .scaled(Cx::new(1.0 - t, 0.0))
            .add(&self.theta_b.scaled(Cx::new(t, 0.0)))
    }

    /// Residual of metric compatibility `θ + θ^* = 0`.
    pub fn skew_hermitian_residual(&self) -> f64 {
        self.theta
            .add(&self.theta.transpose().map(|f| f.conjugate()))
            .norm_inf()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Cx {
        Cx::new(1.0, 0.0)
    }

    fn so3c() -> LieHermitianStructure {
        let n = 3;
        let mk = |a: usize, b: usize| {
            Form::monomial(n, &[(a, false), (b, false)], one()).unwrap()
        };
        LieHermitianStructure::new(n, vec![mk(1, 2), mk(2, 0), mk(0, 1)]).unwrap()
    }

    fn n3() -> LieHermitianStructure {
        let n = 3;
        let d3 = &Form::monomial(n, &[(0, false), (0, true)], one()).unwrap()
            - &Form::monomial(n, &[(1, false), (1, true)], one()).unwrap();
        LieHermitianStructure::new(n, vec![Form::zero(n), Form::zero(n), d3]).unwrap()
    }

    #[test]
    fn so3c_has_zero_theta_and_half_torsion() {
        let b = ConnectionBundle::new(&so3c()).unwrap();
        assert!(b.theta.norm_inf() < 1e-14);
        assert!((b.torsion.t(0, 1, 2) - Cx::new(0.5, 0.0)).norm() < 1e-14);
        assert!((b.torsion.t(1, 2, 0) - Cx::new(0.5, 0.0)).norm() < 1e-14);
        assert!((b.torsion.t(2, 0, 1) - Cx::new(0.5, 0.0)).norm() < 1e-14);
        assert!((b.torsion.t(0, 0, 1)).norm() < 1e-14);
    }

    #[test]
    fn n3_torsion_and_parallel_frame_direction() {
        let b = ConnectionBundle::new(&n3()).unwrap();
        assert!((b.torsion.t(0, 0, 2) - Cx::new(-0.5, 0.0)).norm() < 1e-14);
        assert!((b.torsion.t(1, 1, 2) - Cx::new(0.5, 0.0)).norm() < 1e-14);
        // θ^b has vanishing third row and column: e_3 is Bismut-parallel.
        for k in 0..3 {
            assert!(b.theta_b.get(2, k).is_zero(1e-14));
            assert!(b.theta_b.get(k, 2).is_zero(1e-14));
        }
    }

    #[test]
    fn chern_theta_is_skew_hermitian() {
        for s in [so3c(), n3()] {
            let b = ConnectionBundle::new(&s).unwrap();
            assert!(b.skew_hermitian_residual() < 1e-14);
        }
    }

    #[test]
    fn gauduchon_interpolates() {
        let b = ConnectionBundle::new(&n3()).unwrap();
        assert!(b.gauduchon_theta(0.0).sub(&b.theta).norm_inf() < 1e-14);
        assert!(b.gauduchon_theta(1.0).sub(&b.theta_b).norm_inf() < 1e-14);
    }
}
