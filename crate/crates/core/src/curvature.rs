//! Curvature 4-tensors of the Chern, Bismut, and Levi-Civita connections.
//!
//! For a Hermitian connection with matrix `m` (`∇e_k = Σ_p m_{kp} e_p`) the
//! curvature matrix is `Θ = dm − m ∧ m` and the lowered components in a
//! unitary frame are `R_{a b k ℓ̄} = Θ_{kℓ}(E_a, E_b)` where `E_a` runs over
//! the complexified frame `e_1, …, e_n, ē_1, …, ē_n`.
//!
//! The Levi-Civita connection mixes `T^{1,0}` and `T^{0,1}`. Under the
//! complexified frame its curvature splits into the blocks
//! `Θ_1 = dθ_1 − θ_1∧θ_1 − θ̄_2∧θ_2` and `Θ_2 = dθ_2 − θ_2∧θ_1 − θ̄_1∧θ_2`;
//! the components with last pair `(e_k, ē_ℓ)` come from `Θ_1`
//! ([`CurvatureKind::Riemannian1`]) and those with last pair `(e_k, e_ℓ)`
//! from `conj(Θ_2)` ([`CurvatureKind::Riemannian2`]).

use crate::connection::ConnectionBundle;
use crate::form::{FormMatrix, FrameVector};
use crate::structure::LieHermitianStructure;
use crate::{Cx, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureKind {
    Chern,
    Bismut,
    /// Levi-Civita components `R_{a b k ℓ̄}`.
    Riemannian1,
    /// Levi-Civita components `R_{a b k ℓ}` (both last slots unbarred).
    Riemannian2,
}

/// Dense curvature components `R_{a b k ·}` with `a`, `b` ranging over the
/// complexified frame (`0..2n`, barred after unbarred) and `k`, `ℓ` over
/// `0..n`. The bar structure of the last pair is fixed by the kind.
#[derive(Debug, Clone)]
pub struct Curvature4Tensor {
    n: usize,
    kind: CurvatureKind,
    data: Vec<Cx>,
}

fn flat(v: FrameVector, n: usize) -> usize {
    v.index + if v.barred { n } else { 0 }
}

impl Curvature4Tensor {
    fn from_theta_matrix(
        s: &LieHermitianStructure,
        big_theta: &FormMatrix,
        kind: CurvatureKind,
    ) -> Result<Self> {
        let n = s.n();
        let mut data = vec![Cx::new(0.0, 0.0); 2 * n * 2 * n * n * n];
        for a in 0..2 * n {
            let va = FrameVector { index: a % n, barred: a >= n };
            for b in 0..2 * n {
                let vb = FrameVector { index: b % n, barred: b >= n };
                for k in 0..n {
                    for l in 0..n {
                        let v = big_theta.get(k, l).evaluate(va, vb)?;
                        data[((a * 2 * n + b) * n + k) * n + l] = v;
                    }
                }
            }
        }
        Ok(Curvature4Tensor { n, kind, data })
    }

    /// Assemble from the mixed block alone (the (2,0) and (0,2) blocks are
    /// zero, as for a Chern-type curvature): `mixed(k, l, i, j) = R_{k l̄ i j̄}`.
    pub(crate) fn from_mixed_block<F>(n: usize, kind: CurvatureKind, mixed: F) -> Self
    where
        F: Fn(usize, usize, usize, usize) -> Cx,
    {
        let mut data = vec![Cx::new(0.0, 0.0); 2 * n * 2 * n * n * n];
        for k in 0..n {
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let v = mixed(k, l, i, j);
                        data[((k * 2 * n + (n + l)) * n + i) * n + j] = v;
                        data[(((n + l) * 2 * n + k) * n + i) * n + j] = -v;
                    }
                }
            }
        }
        Curvature4Tensor { n, kind, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> CurvatureKind {
        self.kind
    }

    /// Component with general first pair.
    pub fn get(&self, a: FrameVector, b: FrameVector, k: usize, l: usize) -> Cx {
        let (fa, fb) = (flat(a, self.n), flat(b, self.n));
        self.data[((fa * 2 * self.n + fb) * self.n + k) * self.n + l]
    }

    /// `R_{i j̄ k ℓ̄}` (for [`CurvatureKind::Riemannian2`]: `R_{i j̄ k ℓ}`).
    pub fn mixed(&self, i: usize, j: usize, k: usize, l: usize) -> Cx {
        self.get(FrameVector::unbarred(i), FrameVector::barred(j), k, l)
    }

    /// `R_{i j k ℓ̄}` (first pair unbarred).
    pub fn hol(&self, i: usize, j: usize, k: usize, l: usize) -> Cx {
        self.get(FrameVector::unbarred(i), FrameVector::unbarred(j), k, l)
    }

    /// `R_{ī j̄ k ℓ̄}` (first pair barred).
    pub fn antihol(&self, i: usize, j: usize, k: usize, l: usize) -> Cx {
        self.get(FrameVector::barred(i), FrameVector::barred(j), k, l)
    }

    pub fn norm_inf(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest magnitude over the `(2,0)` first-pair block `R_{i j k ℓ̄}`.
    pub fn hol_block_norm_inf(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    for l in 0..self.n {
                        max = max.max(self.hol(i, j, k, l).norm());
                    }
                }
            }
        }
        max
    }

    /// Residual of `R_{ab··} = −R_{ba··}`.
    pub fn first_pair_antisymmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut max = 0.0f64;
        for a in 0..2 * n {
            let va = FrameVector { index: a % n, barred: a >= n };
            for b in 0..2 * n {
                let vb = FrameVector { index: b % n, barred: b >= n };
                for k in 0..n {
                    for l in 0..n {
                        max = max.max((self.get(va, vb, k, l) + self.get(vb, va, k, l)).norm());
                    }
                }
            }
        }
        max
    }

    /// Residual of the pairwise-conjugate symmetry
    /// `conj(R_{i j̄ k ℓ̄}) = R_{j ī ℓ k̄}` (Chern and Bismut kinds).
    pub fn pairwise_conjugate_residual(&self) -> f64 {
        let n = self.n;
        let mut max = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let lhs = self.mixed(i, j, k, l).conj();
                        let rhs = self
                            .get(FrameVector::unbarred(j), FrameVector::barred(i), l, k);
                        max = max.max((lhs - rhs).norm());
                    }
                }
            }
        }
        max
    }
}

/// Curvature of a Hermitian connection matrix (Chern, Bismut, or any
/// t-Gauduchon interpolation): `Θ = dm − m ∧ m`.
pub fn curvature(
    s: &LieHermitianStructure,
    m: &FormMatrix,
    kind: CurvatureKind,
) -> Result<Curvature4Tensor> {
    let dm = m.map(|f| s.d(f));
    let big_theta = dm.sub(&m.wedge(m));
    Curvature4Tensor::from_theta_matrix(s, &big_theta, kind)
}

/// Levi-Civita curvature blocks: returns `(R_{abkℓ̄}, R_{abkℓ})`.
pub fn riemannian_curvature(
    s: &LieHermitianStructure,
    b: &ConnectionBundle,
) -> Result<(Curvature4Tensor, Curvature4Tensor)> {
    let d1 = b.theta1.map(|f| s.d(f));
    let theta2_bar = b.theta2.map(|f| f.conjugate());
    let theta1_bar = b.theta1.map(|f| f.conjugate());
    let big1 = d1.sub(&b.theta1.wedge(&b.theta1)).sub(&theta2_bar.wedge(&b.theta2));
    let d2 = b.theta2.map(|f| s.d(f));
    let big2 = d2.sub(&b.theta2.wedge(&b.theta1)).sub(&theta1_bar.wedge(&b.theta2));
    let r1 = Curvature4Tensor::from_theta_matrix(s, &big1, CurvatureKind::Riemannian1)?;
    let big2_bar = big2.map(|f| f.conjugate());
    let r2 = Curvature4Tensor::from_theta_matrix(s, &big2_bar, CurvatureKind::Riemannian2)?;
    Ok((r1, r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::Form;

    fn one() -> Cx {
        Cx::new(1.0, 0.0)
    }

    fn so3c() -> LieHermitianStructure {
        let n = 3;
        let mk =
            |a: usize, b: usize| Form::monomial(n, &[(a, false), (b, false)], one()).unwrap();
        LieHermitianStructure::new(n, vec![mk(1, 2), mk(2, 0), mk(0, 1)]).unwrap()
    }

    fn n3() -> LieHermitianStructure {
        let n = 3;
        let d3 = &Form::monomial(n, &[(0, false), (0, true)], one()).unwrap()
            - &Form::monomial(n, &[(1, false), (1, true)], one()).unwrap();
        LieHermitianStructure::new(n, vec![Form::zero(n), Form::zero(n), d3]).unwrap()
    }

    #[test]
    fn so3c_is_chern_flat() {
        let s = so3c();
        let b = ConnectionBundle::new(&s).unwrap();
        let rc = curvature(&s, &b.theta, CurvatureKind::Chern).unwrap();
        assert!(rc.norm_inf() < 1e-14);
    }

    #[test]
    fn abelian_has_zero_curvatures() {
        let s = LieHermitianStructure::abelian(3);
        let b = ConnectionBundle::new(&s).unwrap();
        for m in [&b.theta, &b.theta_b] {
            let r = curvature(&s, m, CurvatureKind::Bismut).unwrap();
            assert!(r.norm_inf() < 1e-14);
        }
        let (r1, r2) = riemannian_curvature(&s, &b).unwrap();
        assert!(r1.norm_inf() < 1e-14);
        assert!(r2.norm_inf() < 1e-14);
    }

    #[test]
    fn n3_bismut_curvature_pair_symmetry() {
        let s = n3();
        let b = ConnectionBundle::new(&s).unwrap();
        let rb = curvature(&s, &b.theta_b, CurvatureKind::Bismut).unwrap();
        assert!(rb.first_pair_antisymmetry_residual() < 1e-13);
        assert!(rb.pairwise_conjugate_residual() < 1e-13);
        let mut max = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        max =
                            max.max((rb.mixed(i, j, k, l) - rb.mixed(k, l, i, j)).norm());
                    }
                }
            }
        }
        assert!(max < 1e-13, "R^b_{{i j̄ k ℓ̄}} = R^b_{{k ℓ̄ i j̄}} fails: {max}");
        assert!((rb.mixed(0, 0, 0, 0) - Cx::new(-2.0, 0.0)).norm() < 1e-13);
        assert!((rb.mixed(0, 0, 1, 1) - Cx::new(2.0, 0.0)).norm() < 1e-13);
    }
}
