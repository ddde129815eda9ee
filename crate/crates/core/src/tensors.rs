//! Torsion components, Bismut-covariant derivatives, and derived tensors.
//!
//! Index conventions: `T^k_{ij}` is antisymmetric in `(i, j)`; covariant
//! derivatives along the frame are taken with a connection matrix `m`
//! (`∇e_i = Σ_j m_{ij} e_j`), an upper index contracting with `m_{r·}` and
//! each lower index with `−m_{·r}`. Left-invariant components are constants,
//! so the directional term vanishes.
//!
//! The derived tensors:
//!
//! * `η_k = Σ_i T^i_{ik}` (Gauduchon torsion 1-form),
//! * `A_{k ℓ̄} = Σ_{r,s} T^r_{sk} conj(T^r_{sℓ})`,
//! * `B_{k ℓ̄} = Σ_{r,s} T^ℓ_{rs} conj(T^k_{rs})`,
//! * `C_{ik} = Σ_{r,s} T^r_{si} T^s_{rk}`,
//! * `φ^ℓ_k = Σ_r conj(η_r) T^ℓ_{kr}`,
//! * `P^{jℓ}_{ik} = Σ_r [T^r_{ik} conj(T^r_{jℓ}) + T^j_{ir} conj(T^k_{ℓr})
//!   − T^j_{kr} conj(T^i_{ℓr}) − T^ℓ_{ir} conj(T^k_{jr}) + T^ℓ_{kr} conj(T^i_{jr})]`,
//! * `Q_{i j̄ k ℓ̄} = R^b_{i j̄ k ℓ̄} − R^b_{k j̄ i ℓ̄}` and its trace
//!   `Ric(Q)_{i j̄} = Σ_r (R^b_{i j̄ r r̄} − R^b_{r j̄ i r̄})`.

use nalgebra::DMatrix;

use crate::curvature::Curvature4Tensor;
use crate::form::{FormMatrix, FrameVector};
use crate::Cx;

/// Chern torsion components `T^k_{ij}`, dense, antisymmetric in `(i, j)`.
#[derive(Debug, Clone)]
pub struct Torsion {
    n: usize,
    data: Vec<Cx>,
}

impl Torsion {
    pub fn zeros(n: usize) -> Self {
        Torsion { n, data: vec![Cx::new(0.0, 0.0); n * n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self, k: usize, i: usize, j: usize) -> Cx {
        self.data[(k * self.n + i) * self.n + j]
    }

    /// Set `T^k_{ij}` and its antisymmetric partner.
    pub fn set(&mut self, k: usize, i: usize, j: usize, v: Cx) {
        self.data[(k * self.n + i) * self.n + j] = v;
        self.data[(k * self.n + j) * self.n + i] = -v;
    }

    /// `η_k = Σ_i T^i_{ik}`.
    pub fn eta(&self) -> Vec<Cx> {
        (0..self.n)
            .map(|k| (0..self.n).map(|i| self.t(i, i, k)).sum())
            .collect()
    }

    pub fn norm_inf(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Torsion) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Covariant derivatives `T^j_{ik,ℓ}` (`d10`) and `T^j_{ik,ℓ̄}` (`d01`) of the
/// Chern torsion with respect to the given connection matrix.
#[derive(Debug, Clone)]
pub struct TorsionDerivatives {
    n: usize,
    d10: Vec<Cx>,
    d01: Vec<Cx>,
}

impl TorsionDerivatives {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `T^j_{ik,ℓ}`.
    pub fn d10(&self, j: usize, i: usize, k: usize, l: usize) -> Cx {
        self.d10[((j * self.n + i) * self.n + k) * self.n + l]
    }

    /// `T^j_{ik,ℓ̄}`.
    pub fn d01(&self, j: usize, i: usize, k: usize, l: usize) -> Cx {
        self.d01[((j * self.n + i) * self.n + k) * self.n + l]
    }

    pub fn d10_norm_inf(&self) -> f64 {
        self.d10.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn d01_norm_inf(&self) -> f64 {
        self.d01.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn norm_inf(&self) -> f64 {
        self.d10_norm_inf().max(self.d01_norm_inf())
    }
}

/// Evaluate the connection matrix on a frame vector: `m_{ij}(x)`.
fn m_at(m: &FormMatrix, i: usize, j: usize, x: FrameVector) -> Cx {
    m.get(i, j).coeff1(x.index, x.barred)
}

/// Covariant derivative of the torsion along all frame directions.
pub fn covariant_derivative_t(torsion: &Torsion, m: &FormMatrix) -> TorsionDerivatives {
    let n = torsion.n();
    let mut d10 = vec![Cx::new(0.0, 0.0); n * n * n * n];
    let mut d01 = vec![Cx::new(0.0, 0.0); n * n * n * n];
    for (slot, barred) in [(&mut d10, false), (&mut d01, true)] {
        for j in 0..n {
            for i in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let x = FrameVector { index: l, barred };
                        let mut v = Cx::new(0.0, 0.0);
                        for r in 0..n {
                            v += torsion.t(r, i, k) * m_at(m, r, j, x);
                            v -= m_at(m, i, r, x) * torsion.t(j, r, k);
                            v -= m_at(m, k, r, x) * torsion.t(j, i, r);
                        }
                        slot[((j * n + i) * n + k) * n + l] = v;
                    }
                }
            }
        }
    }
    TorsionDerivatives { n, d10, d01 }
}

/// Covariant derivative of a Hermitian-form-type tensor `S_{i j̄}` along every
/// frame direction; returns the largest component magnitude.
pub fn covariant_derivative_form_norm(s: &DMatrix<Cx>, m: &FormMatrix) -> f64 {
    let n = m.rows();
    let mut max = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for l in 0..(2 * n) {
                let x = FrameVector { index: l % n, barred: l >= n };
                // the barred slot transforms by the conjugate connection form,
                // so conjugate both the entry and the evaluation direction
                let xc = FrameVector { index: x.index, barred: !x.barred };
                let mut v = Cx::new(0.0, 0.0);
                for r in 0..n {
                    v -= m_at(m, i, r, x) * s[(r, j)];
                    v -= m_at(m, j, r, xc).conj() * s[(i, r)];
                }
                max = max.max(v.norm());
            }
        }
    }
    max
}

/// Covariant derivative of a `(1,0)`-form component vector `η_k` along every
/// frame direction; returns the components indexed `[k][direction]`.
pub fn covariant_derivative_eta(eta: &[Cx], m: &FormMatrix) -> Vec<Vec<Cx>> {
    let n = m.rows();
    (0..n)
        .map(|k| {
            (0..2 * n)
                .map(|l| {
                    let x = FrameVector { index: l % n, barred: l >= n };
                    let mut v = Cx::new(0.0, 0.0);
                    for r in 0..n {
                        v -= m_at(m, k, r, x) * eta[r];
                    }
                    v
                })
                .collect()
        })
        .collect()
}

/// The derived tensors of the torsion and of the Bismut curvature.
#[derive(Debug, Clone)]
pub struct DerivedTensors {
    n: usize,
    pub eta: Vec<Cx>,
    /// `|η|² = Σ_k |η_k|²` (squared norm of the torsion vector field χ).
    pub chi_norm2: f64,
    /// `A_{k ℓ̄}` at `(k, ℓ)`.
    pub a: DMatrix<Cx>,
    /// `B_{k ℓ̄}` at `(k, ℓ)`.
    pub b: DMatrix<Cx>,
    /// `C_{ik}` at `(i, k)`.
    pub c: DMatrix<Cx>,
    /// `φ^ℓ_k` at `(k, ℓ)`; the endomorphism `e_k ↦ Σ_ℓ φ^ℓ_k e_ℓ` is the
    /// transpose of this storage.
    pub phi: DMatrix<Cx>,
    /// `Ric(Q)_{i j̄}` at `(i, j)`.
    pub ric_q: DMatrix<Cx>,
    p: Vec<Cx>,
    q: Vec<Cx>,
}

impl DerivedTensors {
    pub fn new(torsion: &Torsion, rb: &Curvature4Tensor) -> Self {
        let n = torsion.n();
        let eta = torsion.eta();
        let chi_norm2 = eta.iter().map(|c| c.norm_sqr()).sum();
        let zero = Cx::new(0.0, 0.0);

        let a = DMatrix::from_fn(n, n, |k, l| {
            let mut v = zero;
            for r in 0..n {
                for s in 0..n {
                    v += torsion.t(r, s, k) * torsion.t(r, s, l).conj();
                }
            }
            v
        });
        let b = DMatrix::from_fn(n, n, |k, l| {
            let mut v = zero;
            for r in 0..n {
                for s in 0..n {
                    v += torsion.t(l, r, s) * torsion.t(k, r, s).conj();
                }
            }
            v
        });
        let c = DMatrix::from_fn(n, n, |i, k| {
            let mut v = zero;
            for r in 0..n {
                for s in 0..n {
                    v += torsion.t(r, s, i) * torsion.t(s, r, k);
                }
            }
            v
        });
        let phi = DMatrix::from_fn(n, n, |k, l| {
            let mut v = zero;
            for r in 0..n {
                v += eta[r].conj() * torsion.t(l, k, r);
            }
            v
        });

        let mut p = vec![zero; n * n * n * n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        let mut v = zero;
                        for r in 0..n {
                            v += torsion.t(r, i, k) * torsion.t(r, j, l).conj();
                            v += torsion.t(j, i, r) * torsion.t(k, l, r).conj();
                            v -= torsion.t(j, k, r) * torsion.t(i, l, r).conj();
                            v -= torsion.t(l, i, r) * torsion.t(k, j, r).conj();
                            v += torsion.t(l, k, r) * torsion.t(i, j, r).conj();
                        }
                        p[((i * n + k) * n + j) * n + l] = v;
                    }
                }
            }
        }

        let mut q = vec![zero; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        q[((i * n + j) * n + k) * n + l] =
                            rb.mixed(i, j, k, l) - rb.mixed(k, j, i, l);
                    }
                }
            }
        }
        let ric_q = DMatrix::from_fn(n, n, |i, j| {
            let mut v = zero;
            for r in 0..n {
                v += rb.mixed(i, j, r, r) - rb.mixed(r, j, i, r);
            }
            v
        });

        DerivedTensors { n, eta, chi_norm2, a, b, c, phi, ric_q, p, q }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `P^{jℓ}_{ik}`.
    pub fn p(&self, j: usize, l: usize, i: usize, k: usize) -> Cx {
        self.p[((i * self.n + k) * self.n + j) * self.n + l]
    }

    /// `Q_{i j̄ k ℓ̄}`.
    pub fn q(&self, i: usize, j: usize, k: usize, l: usize) -> Cx {
        self.q[((i * self.n + j) * self.n + k) * self.n + l]
    }

    pub fn q_norm_inf(&self) -> f64 {
        self.q.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::ConnectionBundle;
    use crate::curvature::{curvature, CurvatureKind};
    use crate::form::Form;
    use crate::structure::LieHermitianStructure;

    fn one() -> Cx {
        Cx::new(1.0, 0.0)
    }

    fn so3c() -> LieHermitianStructure {
        let n = 3;
        let mk =
            |a: usize, b: usize| Form::monomial(n, &[(a, false), (b, false)], one()).unwrap();
        LieHermitianStructure::new(n, vec![mk(1, 2), mk(2, 0), mk(0, 1)]).unwrap()
    }

    #[test]
    fn so3c_derived_tensors() {
        let s = so3c();
        let b = ConnectionBundle::new(&s).unwrap();
        let rb = curvature(&s, &b.theta_b, CurvatureKind::Bismut).unwrap();
        let dt = DerivedTensors::new(&b.torsion, &rb);
        for k in 0..3 {
            assert!(dt.eta[k].norm() < 1e-14);
            for l in 0..3 {
                let expect = if k == l { 0.5 } else { 0.0 };
                assert!((dt.b[(k, l)] - Cx::new(expect, 0.0)).norm() < 1e-13);
                assert!((dt.a[(k, l)] - Cx::new(expect, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn eta_of_nilmanifold_family() {
        // dφ_3 = φ_1∧φ̄_1 + b φ_2∧φ̄_2 has η_3 = −(1 + conj(b))/2.
        let n = 3;
        let bval = Cx::new(0.0, 1.0);
        let d3 = &Form::monomial(n, &[(0, false), (0, true)], one()).unwrap()
            + &Form::monomial(n, &[(1, false), (1, true)], bval).unwrap();
        let s =
            LieHermitianStructure::new(n, vec![Form::zero(n), Form::zero(n), d3]).unwrap();
        let b = ConnectionBundle::new(&s).unwrap();
        let eta = b.torsion.eta();
        assert!(eta[0].norm() < 1e-14);
        assert!(eta[1].norm() < 1e-14);
        let expect = -(one() + bval.conj()) * 0.5;
        assert!((eta[2] - expect).norm() < 1e-14);
    }

    #[test]
    fn bismut_parallel_torsion_for_n3() {
        let n = 3;
        let d3 = &Form::monomial(n, &[(0, false), (0, true)], one()).unwrap()
            - &Form::monomial(n, &[(1, false), (1, true)], one()).unwrap();
        let s =
            LieHermitianStructure::new(n, vec![Form::zero(n), Form::zero(n), d3]).unwrap();
        let b = ConnectionBundle::new(&s).unwrap();
        let dt = covariant_derivative_t(&b.torsion, &b.theta_b);
        assert!(dt.norm_inf() < 1e-14);
    }
}
