//! Left-invariant Hermitian structures given by structure constants.
//!
//! A structure of complex dimension `n` is described by the exterior
//! derivatives `dφ_1, …, dφ_n` of a unitary coframe, each a constant-
//! coefficient 2-form without `(0, 2)` part (integrability of the complex
//! structure). The exterior derivative extends to the whole algebra by the
//! graded Leibniz rule with `dφ̄_k = conj(dφ_k)`; left-invariance means all
//! scalar coefficients are constants, so no directional derivative terms
//! appear.
//!
//! Writing `dφ_m = Σ_{j,k} C^m_{jk} φ_j ∧ φ_k + Σ_{j,k} D^m_{j k̄} φ_j ∧ φ̄_k`
//! with `C` antisymmetric in its lower pair, the accessors [`c_coeff`] and
//! [`d_coeff`] return `C^m_{jk}` (half the canonical wedge coefficient) and
//! `D^m_{j k̄}` (the canonical coefficient) respectively.
//!
//! [`c_coeff`]: LieHermitianStructure::c_coeff
//! [`d_coeff`]: LieHermitianStructure::d_coeff

use nalgebra::DMatrix;

use crate::form::{Form, MAX_DIM};
use crate::{Cx, Error, Result};

#[derive(Debug, Clone)]
pub struct LieHermitianStructure {
    n: usize,
    dphi: Vec<Form>,
}

/// Residual diagnostics from [`LieHermitianStructure::validate`].
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// Largest coefficient of any `(0, 2)` component of a `dφ_k`.
    pub max_integrability_residual: f64,
    /// Largest coefficient of any `d(dφ_k)` (Jacobi identity).
    pub max_jacobi_residual: f64,
}

impl ValidationReport {
    pub fn ok(&self, tol: f64) -> bool {
        self.max_integrability_residual <= tol && self.max_jacobi_residual <= tol
    }
}

impl LieHermitianStructure {
    /// Build a structure from the coframe derivatives `dφ_1, …, dφ_n`.
    ///
    /// Shape errors (wrong count, wrong algebra dimension, non-degree-2
    /// content) are rejected here; the tolerance-based integrability and
    /// Jacobi checks live in [`validate`](Self::validate).
    pub fn new(n: usize, dphi: Vec<Form>) -> Result<Self> {
        if n < 2 || n > MAX_DIM {
            return Err(Error::InvalidStructure(format!(
                "dimension must be between 2 and {MAX_DIM}, got {n}"
            )));
        }
        if dphi.len() != n {
            return Err(Error::DimensionMismatch(dphi.len(), n));
        }
        for (k, f) in dphi.iter().enumerate() {
            if f.n() != n {
                return Err(Error::DimensionMismatch(f.n(), n));
            }
            if f.degree() != Some(2) && f.term_count() != 0 {
                return Err(Error::InvalidStructure(format!(
                    "dφ_{} is not a pure degree-2 form",
                    k + 1
                )));
            }
        }
        Ok(LieHermitianStructure { n, dphi })
    }

    /// The abelian structure (all `dφ_k = 0`): flat Kähler.
    pub fn abelian(n: usize) -> Self {
        LieHermitianStructure::new(n, vec![Form::zero(n); n]).expect("abelian structure is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dphi(&self, k: usize) -> &Form {
        &self.dphi[k]
    }

    /// `C^m_{jk}` in the antisymmetric double-sum convention.
    pub fn c_coeff(&self, m: usize, j: usize, k: usize) -> Cx {
        self.dphi[m].coeff(&[(j, false), (k, false)]) * 0.5
    }

    /// `D^m_{j k̄}`, the canonical coefficient of `φ_j ∧ φ̄_k` in `dφ_m`.
    pub fn d_coeff(&self, m: usize, j: usize, k: usize) -> Cx {
        self.dphi[m].coeff(&[(j, false), (k, true)])
    }

    /// Exterior derivative by the graded Leibniz rule. Constant coefficients
    /// contribute no directional term (left-invariance).
    pub fn d(&self, f: &Form) -> Form {
        let mut out = Form::zero(self.n);
        for (mask, c) in f.term_iter() {
            let mut sign = 1.0;
            let mut rest = mask;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                let bit = 1u32 << b;
                let below = mask & (bit - 1);
                let above = mask & !(bit | (bit - 1));
                let dg = if b < self.n {
                    self.dphi[b].clone()
                } else {
                    self.dphi[b - self.n].conjugate()
                };
                let prefix = mask_monomial(self.n, below);
                let suffix = mask_monomial(self.n, above);
                let contrib = prefix.wedge(&dg).wedge(&suffix).scaled(c * sign);
                out = &out + &contrib;
                sign = -sign;
                rest &= rest - 1;
            }
        }
        out
    }

    /// Alias for [`d`](Self::d).
    pub fn exterior_derivative(&self, f: &Form) -> Form {
        self.d(f)
    }

    /// The fundamental 2-form `ω = i Σ_k φ_k ∧ φ̄_k`.
    pub fn omega(&self) -> Form {
        let mut omega = Form::zero(self.n);
        for k in 0..self.n {
            let term = Form::monomial(self.n, &[(k, false), (k, true)], Cx::new(0.0, 1.0))
                .expect("indices in range");
            omega = &omega + &term;
        }
        omega
    }

    /// Integrability and Jacobi residuals.
    pub fn validate(&self) -> ValidationReport {
        let mut max_int = 0.0f64;
        let mut max_jac = 0.0f64;
        for k in 0..self.n {
            max_int = max_int.max(self.dphi[k].bidegree_part(0, 2).norm_inf());
            max_jac = max_jac.max(self.d(&self.dphi[k]).norm_inf());
        }
        ValidationReport {
            max_integrability_residual: max_int,
            max_jacobi_residual: max_jac,
        }
    }

    /// [`validate`](Self::validate) folded into a hard error.
    pub fn ensure_valid(&self, tol: f64) -> Result<()> {
        let report = self.validate();
        if report.ok(tol) {
            Ok(())
        } else {
            Err(Error::InvalidStructure(format!(
                "integrability residual {:.3e}, Jacobi residual {:.3e} exceed tol {:.3e}",
                report.max_integrability_residual, report.max_jacobi_residual, tol
            )))
        }
    }

    /// The homothety `g ↦ c² g` (`c > 0`): the unitary coframe rescales to
    /// `φ' = c φ`, which divides every structure coefficient by `c` (and the
    /// torsion components with it).
    pub fn rescale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::BadParameter(format!("scale factor must be positive, got {c}")));
        }
        let dphi = self
            .dphi
            .iter()
            .map(|f| f.scaled(Cx::new(1.0 / c, 0.0)))
            .collect();
        LieHermitianStructure::new(self.n, dphi)
    }

    /// The same geometry in the new unitary coframe `φ' = U φ`.
    pub fn unitary_change(&self, u: &DMatrix<Cx>, tol: f64) -> Result<Self> {
        let n = self.n;
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::DimensionMismatch(u.nrows(), n));
        }
        let residual = (u * u.adjoint() - DMatrix::<Cx>::identity(n, n)).camax();
        if residual > tol.max(1e-12) {
            return Err(Error::NotUnitary(residual));
        }
        // φ_j = Σ_i conj(U_{ij}) φ'_i, so substitute that expansion into each
        // dφ and recombine rows: dφ'_i = Σ_j U_{ij} dφ_j.
        let mut images = Vec::with_capacity(2 * n);
        for j in 0..n {
            let mut img = Form::zero(n);
            for i in 0..n {
                let gen = Form::generator(n, i, false)?;
                img = &img + &gen.scaled(u[(i, j)].conj());
            }
            images.push(img);
        }
        for j in 0..n {
            images.push(images[j].conjugate());
        }
        let mut dphi_new = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = Form::zero(n);
            for j in 0..n {
                let sub = self.dphi[j].substitute(&images)?;
                acc = &acc + &sub.scaled(u[(i, j)]);
            }
            dphi_new.push(acc);
        }
        LieHermitianStructure::new(n, dphi_new)
    }
}

fn mask_monomial(n: usize, mask: u32) -> Form {
    let mut gens = Vec::new();
    let mut rest = mask;
    while rest != 0 {
        let b = rest.trailing_zeros() as usize;
        if b < n {
            gens.push((b, false));
        } else {
            gens.push((b - n, true));
        }
        rest &= rest - 1;
    }
    Form::monomial(n, &gens, Cx::new(1.0, 0.0)).expect("mask indices in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::FrameVector;

    fn one() -> Cx {
        Cx::new(1.0, 0.0)
    }

    fn n3() -> LieHermitianStructure {
        // dφ_3 = φ_1∧φ̄_1 − φ_2∧φ̄_2.
        let n = 3;
        let d3 = &Form::monomial(n, &[(0, false), (0, true)], one()).unwrap()
            - &Form::monomial(n, &[(1, false), (1, true)], one()).unwrap();
        LieHermitianStructure::new(n, vec![Form::zero(n), Form::zero(n), d3]).unwrap()
    }

    #[test]
    fn abelian_validates() {
        let s = LieHermitianStructure::abelian(3);
        let report = s.validate();
        assert!(report.ok(0.0));
    }

    #[test]
    fn leibniz_on_products() {
        // d(φ_3 ∧ φ̄_3) = dφ_3 ∧ φ̄_3 − φ_3 ∧ dφ̄_3 for N³.
        let s = n3();
        let p3 = Form::generator(3, 2, false).unwrap();
        let p3b = Form::generator(3, 2, true).unwrap();
        let lhs = s.d(&p3.wedge(&p3b));
        let rhs = &s.dphi(2).wedge(&p3b) - &p3.wedge(&s.dphi(2).conjugate());
        assert!(lhs.approx_eq(&rhs, 1e-14));
    }

    #[test]
    fn jacobi_holds_for_n3() {
        let s = n3();
        assert!(s.validate().ok(1e-14));
    }

    #[test]
    fn jacobi_detects_non_integrable_equations() {
        // dφ_1 = φ_2∧φ_3 together with dφ_2 = φ_1∧φ_2 gives
        // d(dφ_1) = φ_1∧φ_2∧φ_3 ≠ 0.
        let n = 3;
        let mk = |a: usize, b: usize| {
            Form::monomial(n, &[(a, false), (b, false)], one()).unwrap()
        };
        let s = LieHermitianStructure::new(n, vec![mk(1, 2), mk(0, 1), Form::zero(n)])
            .unwrap();
        let report = s.validate();
        assert!(report.max_jacobi_residual > 0.5);
    }

    #[test]
    fn d_coefficients_match_input() {
        let s = n3();
        assert_eq!(s.d_coeff(2, 0, 0), one());
        assert_eq!(s.d_coeff(2, 1, 1), -one());
        assert_eq!(s.c_coeff(2, 0, 1), Cx::new(0.0, 0.0));
    }

    #[test]
    fn unitary_change_preserves_validity_and_permutes() {
        let s = n3();
        let n = 3;
        // Swap φ_1 and φ_2: dφ'_3 = φ'_2∧φ̄'_2 − φ'_1∧φ̄'_1.
        let mut u = DMatrix::<Cx>::zeros(n, n);
        u[(0, 1)] = one();
        u[(1, 0)] = one();
        u[(2, 2)] = one();
        let t = s.unitary_change(&u, 1e-12).unwrap();
        assert!(t.validate().ok(1e-12));
        assert_eq!(t.d_coeff(2, 0, 0), -one());
        assert_eq!(t.d_coeff(2, 1, 1), one());
        let v = t
            .dphi(2)
            .evaluate(FrameVector::unbarred(1), FrameVector::barred(1))
            .unwrap();
        assert_eq!(v, one());
    }
}
