//! Metric-condition report: decides the standard Hermitian metric classes
//! with residual diagnostics.
//!
//! Every flag is a residual compared against the caller's tolerance, never a
//! bare boolean, so near-miss inputs are visible. Two conditions are
//! computed by independent routes on purpose: pluriclosedness directly as
//! `‖∂∂̄ω‖` and through the torsion identity
//! `T^j_{ik,ℓ̄} − T^ℓ_{ik,j̄} = −2P^{jℓ}_{ik}`, and parallel torsion both as
//! `‖∇^b T‖` and through the four curvature conditions it is equivalent to:
//!
//! 1. `R^b_{ijkℓ̄} = 0`,
//! 2. `R^b_{ij̄kℓ̄} = R^b_{kℓ̄ij̄}`,
//! 3. `∇^b Ric(Q) = 0`,
//! 4. `Ric(Q)_{χ Ȳ} = 0` with `χ = Σ conj(η_k) e_k`.

use crate::classify::{classify_threefold, Classification};
use crate::connection::ConnectionBundle;
use crate::curvature::{curvature, CurvatureKind};
use crate::form::Form;
use crate::frames::admissible_frame;
use crate::linalg;
use crate::structure::LieHermitianStructure;
use crate::tensors::{covariant_derivative_form_norm, covariant_derivative_t, DerivedTensors};
use crate::{Cx, Error, Result};

/// A decided condition: `holds` iff `residual <= tol` at report time.
#[derive(Debug, Clone, Copy)]
pub struct Flag {
    pub holds: bool,
    pub residual: f64,
}

impl Flag {
    fn new(residual: f64, tol: f64) -> Self {
        Flag { holds: residual <= tol, residual }
    }
}

/// Residuals of the four curvature conditions equivalent to `∇^b T = 0`.
#[derive(Debug, Clone, Copy)]
pub struct BtpTheoremResiduals {
    pub hol_block: f64,
    pub pair_symmetry: f64,
    pub ric_q_parallel: f64,
    pub ric_q_chi: f64,
    pub holds: bool,
}

impl BtpTheoremResiduals {
    pub fn max_residual(&self) -> f64 {
        self.hol_block
            .max(self.pair_symmetry)
            .max(self.ric_q_parallel)
            .max(self.ric_q_chi)
    }
}

/// Locally conformally Kähler test: the torsion must have the rank-one shape
/// `T^j_{ik} = (η_k δ_{ij} − η_i δ_{kj})/(n−1)` and the Lee form `η + η̄`
/// must be closed.
#[derive(Debug, Clone)]
pub struct LckReport {
    pub holds: bool,
    pub shape_residual: f64,
    pub lee_closed_residual: f64,
    pub eta: Vec<Cx>,
}

/// Lee-potential test: `∂η = 0` and `∂ω = c·η∧∂η̄` for a constant `c ≠ 0`.
/// `c` is fitted by least squares and is `None` when `η∧∂η̄` vanishes, in
/// which case the condition degenerates to `∂ω = 0`.
#[derive(Debug, Clone, Copy)]
pub struct LpReport {
    pub holds: bool,
    pub partial_eta_residual: f64,
    pub proportionality_residual: f64,
    pub c: Option<Cx>,
}

/// Degenerate torsion: in an admissible frame all `T^j_{ik}` with
/// `i, k < n` vanish. Only defined for non-balanced parallel-torsion inputs.
#[derive(Debug, Clone, Copy)]
pub struct DegenerateTorsionReport {
    pub holds: bool,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub n: usize,
    pub tol: f64,
    pub kahler: Flag,
    pub balanced: Flag,
    pub gauduchon: Flag,
    pub pluriclosed: Flag,
    /// Cross-check of `pluriclosed` through the torsion identity; the flag
    /// decided from this residual must agree with the direct one.
    pub pluriclosed_torsion_residual: f64,
    pub btp_direct: Flag,
    pub btp_theorem: BtpTheoremResiduals,
    pub bkl: Flag,
    pub lck: LckReport,
    pub vaisman: Flag,
    pub lp: LpReport,
    pub degenerate_torsion: Option<DegenerateTorsionReport>,
    pub gce: Flag,
    pub eta: Vec<Cx>,
    pub b_eigenvalues: Vec<f64>,
    pub classification: Option<Classification>,
}

fn eta_form(n: usize, eta: &[Cx]) -> Form {
    let mut f = Form::zero(n);
    for (k, c) in eta.iter().enumerate() {
        if c.norm() > 0.0 {
            f = &f + &Form::monomial(n, &[(k, false)], *c).expect("index in range");
        }
    }
    f
}

/// Decide every supported metric condition for a left-invariant structure.
pub fn check_all(s: &LieHermitianStructure, tol: f64) -> Result<ConditionReport> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::BadParameter(format!("tolerance must be positive, got {tol}")));
    }
    s.ensure_valid(tol)?;
    let n = s.n();
    let bundle = ConnectionBundle::new(s)?;
    let t = &bundle.torsion;
    let eta = t.eta();
    let rb = curvature(s, &bundle.theta_b, CurvatureKind::Bismut)?;
    let der = DerivedTensors::new(t, &rb);
    let dt = covariant_derivative_t(t, &bundle.theta_b);

    let omega = s.omega();
    let d_omega = s.d(&omega);
    let kahler = Flag::new(d_omega.norm_inf(), tol);
    let balanced = Flag::new(eta.iter().map(|c| c.norm()).fold(0.0, f64::max), tol);

    let mut omega_pow = omega.clone();
    for _ in 0..n.saturating_sub(2) {
        omega_pow = omega_pow.wedge(&omega);
    }
    let ddbar_top = s
        .d(&s.d(&omega_pow).bidegree_part(n - 1, n))
        .bidegree_part(n, n);
    let gauduchon = Flag::new(ddbar_top.norm_inf(), tol);

    let ddbar_omega = s.d(&d_omega.bidegree_part(1, 2)).bidegree_part(2, 2);
    let pluriclosed = Flag::new(ddbar_omega.norm_inf(), tol);
    let mut plcd_torsion = 0.0f64;
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let v = dt.d01(j, i, k, l) - dt.d01(l, i, k, j) + 2.0 * der.p(j, l, i, k);
                    plcd_torsion = plcd_torsion.max(v.norm());
                }
            }
        }
    }

    let btp_direct = Flag::new(dt.norm_inf(), tol);
    let mut pair_symmetry = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    pair_symmetry =
                        pair_symmetry.max((rb.mixed(i, j, k, l) - rb.mixed(k, l, i, j)).norm());
                }
            }
        }
    }
    let mut ric_q_chi = 0.0f64;
    for j in 0..n {
        let mut v = Cx::new(0.0, 0.0);
        for i in 0..n {
            v += eta[i].conj() * der.ric_q[(i, j)];
        }
        ric_q_chi = ric_q_chi.max(v.norm());
    }
    let btp_theorem = {
        let hol_block = rb.hol_block_norm_inf();
        let ric_q_parallel = covariant_derivative_form_norm(&der.ric_q, &bundle.theta_b);
        let holds = hol_block <= tol
            && pair_symmetry <= tol
            && ric_q_parallel <= tol
            && ric_q_chi <= tol;
        BtpTheoremResiduals { hol_block, pair_symmetry, ric_q_parallel, ric_q_chi, holds }
    };

    let bkl = Flag::new(btp_theorem.hol_block.max(der.q_norm_inf()), tol);

    let lck = {
        let scale = 1.0 / (n as f64 - 1.0);
        let mut shape = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                for k in 0..n {
                    let mut model = Cx::new(0.0, 0.0);
                    if i == j {
                        model += scale * eta[k];
                    }
                    if k == j {
                        model -= scale * eta[i];
                    }
                    shape = shape.max((t.t(j, i, k) - model).norm());
                }
            }
        }
        let ef = eta_form(n, &eta);
        let lee = &ef + &ef.conjugate();
        let lee_closed = s.d(&lee).norm_inf();
        LckReport {
            holds: shape <= tol && lee_closed <= tol,
            shape_residual: shape,
            lee_closed_residual: lee_closed,
            eta: eta.clone(),
        }
    };

    let vaisman = Flag {
        holds: lck.holds && btp_direct.holds,
        residual: lck
            .shape_residual
            .max(lck.lee_closed_residual)
            .max(btp_direct.residual),
    };

    let lp = {
        let ef = eta_form(n, &eta);
        let partial_eta = s.d(&ef).bidegree_part(2, 0).norm_inf();
        let partial_omega = d_omega.bidegree_part(2, 1);
        let partial_eta_bar = s.d(&ef.conjugate()).bidegree_part(1, 1);
        let h = ef.wedge(&partial_eta_bar);
        let hh = h.inner(&h).re;
        if hh.sqrt() <= tol {
            let prop = partial_omega.norm_inf();
            LpReport {
                holds: partial_eta <= tol && prop <= tol,
                partial_eta_residual: partial_eta,
                proportionality_residual: prop,
                c: None,
            }
        } else {
            let c = partial_omega.inner(&h) / hh;
            let prop = (&partial_omega - &h.scaled(c)).norm_inf();
            LpReport {
                holds: partial_eta <= tol && prop <= tol && c.norm() > tol,
                partial_eta_residual: partial_eta,
                proportionality_residual: prop,
                c: Some(c),
            }
        }
    };

    let degenerate_torsion = if btp_direct.holds && !balanced.holds {
        match admissible_frame(s, tol) {
            Ok(af) => {
                let moved = s.unitary_change(&af.u, tol)?;
                let tb = ConnectionBundle::new(&moved)?.torsion;
                let mut res = 0.0f64;
                for j in 0..n {
                    for i in 0..n - 1 {
                        for k in 0..n - 1 {
                            res = res.max(tb.t(j, i, k).norm());
                        }
                    }
                }
                Some(DegenerateTorsionReport { holds: res <= tol, residual: res })
            }
            Err(_) => None,
        }
    } else {
        None
    };

    let gce = Flag {
        holds: btp_direct.holds && lp.holds,
        residual: btp_direct
            .residual
            .max(lp.partial_eta_residual)
            .max(lp.proportionality_residual),
    };

    let (b_eigenvalues, _) = linalg::hermitian_eigen_desc(&der.b);
    let classification = if n == 3 { Some(classify_threefold(s, tol)?) } else { None };

    Ok(ConditionReport {
        n,
        tol,
        kahler,
        balanced,
        gauduchon,
        pluriclosed,
        pluriclosed_torsion_residual: plcd_torsion,
        btp_direct,
        btp_theorem,
        bkl,
        lck,
        vaisman,
        lp,
        degenerate_torsion,
        gce,
        eta,
        b_eigenvalues,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Cx {
        Cx::new(1.0, 0.0)
    }

    fn nilmanifold_b(bval: Cx) -> LieHermitianStructure {
        let n = 3;
        let d3 = &Form::monomial(n, &[(0, false), (0, true)], one()).unwrap()
            + &Form::monomial(n, &[(1, false), (1, true)], bval).unwrap();
        LieHermitianStructure::new(n, vec![Form::zero(n), Form::zero(n), d3]).unwrap()
    }

    #[test]
    fn abelian_structure_is_everything() {
        let r = check_all(&LieHermitianStructure::abelian(3), 1e-9).unwrap();
        assert!(r.kahler.holds);
        assert!(r.balanced.holds);
        assert!(r.gauduchon.holds);
        assert!(r.pluriclosed.holds);
        assert!(r.btp_direct.holds);
        assert!(r.btp_theorem.holds);
        assert!(r.bkl.holds);
        assert!(r.lck.holds);
        assert!(r.lp.holds);
    }

    #[test]
    fn so3c_report() {
        let n = 3;
        let mk =
            |a: usize, b: usize| Form::monomial(n, &[(a, false), (b, false)], one()).unwrap();
        let s = LieHermitianStructure::new(n, vec![mk(1, 2), mk(2, 0), mk(0, 1)]).unwrap();
        let r = check_all(&s, 1e-9).unwrap();
        assert!(!r.kahler.holds);
        assert!(r.balanced.holds);
        assert!(r.btp_direct.holds);
        assert!(r.btp_theorem.holds);
        assert!(!r.bkl.holds, "Q != 0 for this structure");
        for v in &r.b_eigenvalues {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn nilmanifold_family_flags() {
        for (bval, balanced, bkl) in [
            (Cx::new(-1.0, 0.0), true, false),
            (Cx::new(1.0, 0.0), false, false),
            (Cx::new(0.0, 1.0), false, true),
            (Cx::new(0.0, 2.0), false, true),
            (Cx::new(1.0, 1.0), false, false),
        ] {
            let r = check_all(&nilmanifold_b(bval), 1e-9).unwrap();
            assert!(r.btp_direct.holds, "parallel torsion for b = {bval}");
            assert_eq!(r.btp_theorem.holds, r.btp_direct.holds);
            assert_eq!(r.balanced.holds, balanced, "balanced for b = {bval}");
            assert_eq!(r.bkl.holds, bkl, "bkl for b = {bval}");
            assert_eq!(r.pluriclosed.holds, bkl, "pluriclosed iff bkl here");
            assert_eq!(
                r.pluriclosed.holds,
                r.pluriclosed_torsion_residual <= 1e-9,
                "torsion route must agree"
            );
            if !balanced {
                let dg = r.degenerate_torsion.expect("admissible frame exists");
                assert!(dg.holds, "non-balanced parallel-torsion threefold");
                assert!(r.lp.holds, "LP iff degenerate torsion");
                assert!(r.gce.holds);
            }
        }
    }

    #[test]
    fn vaisman_nilmanifold() {
        let r = check_all(&nilmanifold_b(one()), 1e-9).unwrap();
        assert!(r.lck.holds);
        assert!(r.vaisman.holds);
        let c = r.classification.unwrap();
        assert_eq!(c.label, "generalized-vaisman");
        assert!(c.vaisman_refinement);
    }
}
