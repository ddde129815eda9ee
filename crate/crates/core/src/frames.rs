//! Normal-form unitary frames: admissible frames for non-balanced
//! torsion-parallel structures and special frames for balanced threefolds.

use nalgebra::{DMatrix, DVector};

use crate::connection::ConnectionBundle;
use crate::linalg;
use crate::structure::LieHermitianStructure;
use crate::tensors::{covariant_derivative_t, Torsion};
use crate::{Cx, Error, Result};

/// Result of the admissible-frame construction: after the coframe change
/// `φ' = U φ`, the torsion 1-form is `η = λ φ'_n` with `λ = |η| > 0` and the
/// matrix `φ^ℓ_k = Σ_r conj(η_r) T^ℓ_{kr}` is `λ · diag(a_1, …, a_{n−1}, 0)`.
#[derive(Debug, Clone)]
pub struct AdmissibleFrameResult {
    pub u: DMatrix<Cx>,
    pub lambda: f64,
    /// The `n − 1` eigenvalue ratios `a_i` (the trailing zero is omitted),
    /// sorted by descending modulus.
    pub a: Vec<Cx>,
}

/// Result of the special-frame construction for a balanced threefold: after
/// `φ' = U φ` the torsion satisfies `T^i_{ik} = 0` and
/// `T^1_{23} = a_1 ≥ T^2_{31} = a_2 ≥ T^3_{12} = a_3 ≥ 0`.
#[derive(Debug, Clone)]
pub struct SpecialFrameResult {
    pub u: DMatrix<Cx>,
    pub a: [f64; 3],
}

fn phi_matrix_endomorphism(torsion: &Torsion, eta: &[Cx]) -> DMatrix<Cx> {
    let n = torsion.n();
    // Endomorphism entry (ℓ, k) is φ^ℓ_k = Σ_r conj(η_r) T^ℓ_{kr}.
    DMatrix::from_fn(n, n, |l, k| {
        let mut v = Cx::new(0.0, 0.0);
        for r in 0..n {
            v += eta[r].conj() * torsion.t(l, k, r);
        }
        v
    })
}

/// Construct an admissible frame for a non-balanced structure with
/// Bismut-parallel torsion.
///
/// Stage 1 rotates the coframe so that `η` becomes `λ φ_n` exactly; stage 2
/// unitarily diagonalizes the (normal) `φ`-matrix restricted to the first
/// `n − 1` slots. Both invariants are re-verified on the transformed
/// structure.
pub fn admissible_frame(
    s: &LieHermitianStructure,
    tol: f64,
) -> Result<AdmissibleFrameResult> {
    let n = s.n();
    s.ensure_valid(tol)?;
    let b = ConnectionBundle::new(s)?;
    let btp_res = covariant_derivative_t(&b.torsion, &b.theta_b).norm_inf();
    if btp_res > tol {
        return Err(Error::NotTorsionParallel(btp_res));
    }
    let eta = b.torsion.eta();
    let lambda = eta.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if lambda <= tol {
        return Err(Error::BalancedInput(lambda));
    }

    // Stage 1: a unitary whose action sends η to λ φ_n. With V unitary and
    // v = conj(η)/λ as its last column, U₁ = V^* does the job (1-forms
    // transform by conj(U) when the coframe changes by φ' = Uφ).
    let v = DVector::from_iterator(n, eta.iter().map(|c| c.conj() / lambda));
    let big_v = linalg::unitary_with_last_column(&v);
    let u1 = big_v.adjoint();
    let s1 = s.unitary_change(&u1, tol)?;
    let b1 = ConnectionBundle::new(&s1)?;
    let eta1 = b1.torsion.eta();
    for (k, e) in eta1.iter().enumerate() {
        let expect = if k + 1 == n { Cx::new(lambda, 0.0) } else { Cx::new(0.0, 0.0) };
        if (e - expect).norm() > 1e-9 * lambda.max(1.0) {
            return Err(Error::Internal(format!(
                "η rotation failed at component {} (got {e})",
                k + 1
            )));
        }
    }

    // Stage 2: diagonalize the φ-matrix on the first n−1 slots. Under the
    // parallel-torsion assumptions the restriction is normal; failure signals
    // an upstream inconsistency and is reported as such.
    let phi1 = phi_matrix_endomorphism(&b1.torsion, &eta1);
    let block = phi1.view((0, 0), (n - 1, n - 1)).into_owned();
    let (vals, u2) = linalg::diagonalize_normal(&block, tol)?;
    // The endomorphism matrix transforms as M ↦ W M W^* under φ' = Wφ, so
    // W = U₂^* (padded by 1 on the η direction) diagonalizes it.
    let mut w = DMatrix::<Cx>::identity(n, n);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            w[(i, j)] = u2[(j, i)].conj();
        }
    }
    let u = &w * &u1;
    let s2 = s.unitary_change(&u, tol)?;
    let b2 = ConnectionBundle::new(&s2)?;
    let eta2 = b2.torsion.eta();
    let phi2 = phi_matrix_endomorphism(&b2.torsion, &eta2);
    let mut offdiag = 0.0f64;
    for l in 0..n {
        for k in 0..n {
            if l != k {
                offdiag = offdiag.max(phi2[(l, k)].norm());
            }
        }
    }
    if offdiag > tol.max(1e-9) * lambda.max(1.0) {
        return Err(Error::Internal(format!(
            "φ-matrix not diagonal in the constructed frame (residual {offdiag:.3e})"
        )));
    }
    let a = vals.iter().map(|lam| lam / lambda).collect();
    Ok(AdmissibleFrameResult { u, lambda, a })
}

/// Construct a special frame for a balanced threefold via the Takagi
/// factorization of the torsion matrix `N` (`T^j_{ik} = Σ_ℓ ε_{ikℓ} N_{ℓj}`;
/// balanced means `N` is symmetric).
pub fn special_frame(s: &LieHermitianStructure, tol: f64) -> Result<SpecialFrameResult> {
    let n = s.n();
    if n != 3 {
        return Err(Error::NotThreefold(n));
    }
    s.ensure_valid(tol)?;
    let b = ConnectionBundle::new(s)?;
    let eta = b.torsion.eta();
    let eta_norm = eta.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if eta_norm > tol {
        return Err(Error::NotBalanced(eta_norm));
    }
    let t = &b.torsion;
    let nmat = DMatrix::from_fn(3, 3, |l, j| match l {
        0 => t.t(j, 1, 2),
        1 => t.t(j, 2, 0),
        _ => t.t(j, 0, 1),
    });
    let (a, ut) = linalg::takagi(&nmat, tol)?;
    // N transforms as N ↦ conj(det W) · W N Wᵗ under φ' = Wφ; with
    // W = det(U) U^* the result is exactly diag(a).
    let det = ut.determinant();
    let w = ut.adjoint().map(|c| c * det);
    let s2 = s.unitary_change(&w, tol)?;
    let b2 = ConnectionBundle::new(&s2)?;
    let t2 = &b2.torsion;
    let mut shape_res = 0.0f64;
    for i in 0..3 {
        for k in 0..3 {
            shape_res = shape_res.max(t2.t(i, i, k).norm());
        }
    }
    let targets = [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)];
    for (idx, &(j, i, k)) in targets.iter().enumerate() {
        shape_res = shape_res.max((t2.t(j, i, k) - Cx::new(a[idx], 0.0)).norm());
    }
    if shape_res > tol.max(1e-9) {
        return Err(Error::Factorization(format!(
            "special-frame torsion residual {shape_res:.3e}"
        )));
    }
    Ok(SpecialFrameResult { u: w, a: [a[0], a[1], a[2]] })
}
