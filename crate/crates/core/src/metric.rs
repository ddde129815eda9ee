//! Coordinate metrics evaluated at a point.
//!
//! A [`CoordinateMetric`] holds the components `g_{i j̄}(z, z̄)` as rational
//! expressions together with a base point. Degree-2 jets of the entries give
//! every derivative of `g` needed at the point, and the natural-frame
//! formulas then produce the Chern torsion, its first derivatives, the Chern
//! curvature, the Bismut-parallelism residuals, and (for torsion-parallel
//! points) the Levi-Civita curvature with sectional and Ricci evaluators.
//!
//! All point formulas assume the metric is the identity at the point; use
//! [`CoordinateMetric::normalize_point`] first. In that gauge
//!
//! ```text
//! T^j_{ik}      = ½ Σ_ℓ (g_{k ℓ̄,i} − g_{i ℓ̄,k}) g^{ℓ̄ j},
//! R^c_{k ℓ̄ i j̄} = −g_{i j̄,k ℓ̄} + Σ_{p,q} g_{i p̄,k} conj(g_{j q̄,ℓ}) g^{p̄ q},
//! ```
//!
//! the torsion is Bismut-parallel at the point iff
//!
//! ```text
//! ∂_ℓ T^j_{ik} = Σ_r ( g_{ℓ r̄,i} T^j_{rk} + g_{ℓ r̄,k} T^j_{ir} − g_{ℓ j̄,r} T^r_{ik} ),
//! ∂_ℓ̄ T^j_{ik} = 2 Σ_r ( T^j_{ir} conj(T^k_{ℓr}) − T^j_{kr} conj(T^i_{ℓr}) + T^r_{ik} conj(T^r_{jℓ}) ),
//! ```
//!
//! and under that condition the Levi-Civita curvature is algebraic in
//! `(T, ∂T, R^c)`:
//!
//! ```text
//! R_{i j k ℓ̄}   = T^ℓ_{ij;k} + Σ_r ( T^ℓ_{ri} T^r_{jk} − T^ℓ_{rj} T^r_{ik} ),
//! R_{k ℓ̄ i j̄}  = ½ ( R^c_{i ℓ̄ k j̄} + R^c_{k j̄ i ℓ̄} )
//!               + Σ_r ( T^r_{ik} conj(T^r_{jℓ}) − T^j_{kr} conj(T^i_{ℓr}) − T^ℓ_{ir} conj(T^k_{jr}) ).
//! ```

use nalgebra::DMatrix;

use crate::conditions::Flag;
use crate::curvature::{Curvature4Tensor, CurvatureKind};
use crate::expr::Expr;
use crate::jet::{expr_jet, Jet};
use crate::linalg;
use crate::tensors::Torsion;
use crate::{Cx, Error, Result};

/// A Hermitian metric `g_{i j̄}(z, z̄)` given by expression entries, together
/// with the point where it is to be evaluated.
#[derive(Debug, Clone)]
pub struct CoordinateMetric {
    n: usize,
    entries: Vec<Expr>,
    point: Vec<Cx>,
}

impl CoordinateMetric {
    /// `entries` is row-major `n × n`: `entries[i*n + j] = g_{i j̄}`.
    pub fn new(n: usize, entries: Vec<Expr>, point: Vec<Cx>) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadParameter("dimension must be positive".into()));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(entries.len(), n * n));
        }
        if point.len() != n {
            return Err(Error::DimensionMismatch(point.len(), n));
        }
        for e in &entries {
            if let Some(m) = e.max_index() {
                if m >= n {
                    return Err(Error::IndexOutOfRange { index: m, n });
                }
            }
        }
        Ok(CoordinateMetric { n, entries, point })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn point(&self) -> &[Cx] {
        &self.point
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.entries[i * self.n + j]
    }

    /// Jets of all entries at the base point, plus `g` and `g⁻¹` there.
    pub fn jets(&self) -> Result<MetricJets> {
        let n = self.n;
        let mut jets = Vec::with_capacity(n * n);
        for e in &self.entries {
            jets.push(expr_jet(e, &self.point)?);
        }
        let g = DMatrix::from_fn(n, n, |i, j| jets[i * n + j].value());
        let g_inv = g.clone().try_inverse().ok_or(Error::SingularMetric)?;
        Ok(MetricJets { n, jets, g, g_inv })
    }

    /// Hermitian symmetry and positive definiteness at the base point.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if !(tol > 0.0) {
            return Err(Error::BadParameter("tolerance must be positive".into()));
        }
        let mj = self.jets()?;
        let mut herm = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                herm = herm.max((mj.g[(i, j)] - mj.g[(j, i)].conj()).norm());
            }
        }
        if herm > tol {
            return Err(Error::ConstraintViolation(format!(
                "metric is not Hermitian at the point (residual {herm:.3e})"
            )));
        }
        let h = (&mj.g + mj.g.adjoint()).scale(0.5);
        let (eig, _) = linalg::hermitian_eigen_desc(&h);
        let floor = tol * eig.first().copied().unwrap_or(0.0).max(1.0);
        if eig.last().copied().unwrap_or(0.0) <= floor {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(())
    }

    /// Change coordinates by `w = L (z − p)` with `L` a Cholesky-type factor
    /// of `g(p)`, composed symbolically, so the new metric is the identity at
    /// the new base point `w = 0`.
    pub fn normalize_point(&self, tol: f64) -> Result<CoordinateMetric> {
        self.validate(tol)?;
        let n = self.n;
        let mj = self.jets()?;
        let h = (&mj.g + mj.g.adjoint()).scale(0.5);
        let chol = h.cholesky().ok_or(Error::NotPositiveDefinite)?;
        let c = chol.l();
        let c_inv = c
            .try_inverse()
            .ok_or_else(|| Error::Internal("Cholesky factor not invertible".into()))?;
        // z = p + L⁻¹ w with L⁻¹ = (C⁻¹)ᵀ, so g'(0) = C⁻¹ g(p) (C^H)⁻¹ = I.
        let l_inv = c_inv.transpose();
        let mut subs = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = if self.point[i].norm() == 0.0 {
                Expr::real(0.0)
            } else {
                Expr::constant(self.point[i])
            };
            for a in 0..n {
                let coeff = l_inv[(i, a)];
                if coeff.norm() == 0.0 {
                    continue;
                }
                e = Expr::add(e, Expr::mul(Expr::constant(coeff), Expr::var(a)));
            }
            subs.push(e);
        }
        let mut substituted = Vec::with_capacity(n * n);
        for e in &self.entries {
            substituted.push(e.substitute(&subs)?);
        }
        let mut entries = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let mut e = Expr::real(0.0);
                for i in 0..n {
                    for j in 0..n {
                        let coeff = l_inv[(i, a)] * l_inv[(j, b)].conj();
                        if coeff.norm() == 0.0 {
                            continue;
                        }
                        e = Expr::add(
                            e,
                            Expr::mul(Expr::constant(coeff), substituted[i * n + j].clone()),
                        );
                    }
                }
                entries.push(e);
            }
        }
        CoordinateMetric::new(n, entries, vec![Cx::new(0.0, 0.0); n])
    }
}

/// Values and derivatives of the metric entries at the base point.
#[derive(Debug, Clone)]
pub struct MetricJets {
    n: usize,
    jets: Vec<Jet>,
    g: DMatrix<Cx>,
    g_inv: DMatrix<Cx>,
}

impl MetricJets {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn g(&self) -> &DMatrix<Cx> {
        &self.g
    }

    pub fn g_inv(&self) -> &DMatrix<Cx> {
        &self.g_inv
    }

    fn jet(&self, i: usize, j: usize) -> &Jet {
        &self.jets[i * self.n + j]
    }

    /// `g_{i j̄}` at the point.
    pub fn value(&self, i: usize, j: usize) -> Cx {
        self.g[(i, j)]
    }

    /// `g_{i j̄,k}`.
    pub fn d_hol(&self, i: usize, j: usize, k: usize) -> Cx {
        self.jet(i, j).d1(k)
    }

    /// `g_{i j̄,k̄}`.
    pub fn d_anti(&self, i: usize, j: usize, k: usize) -> Cx {
        self.jet(i, j).d1(self.n + k)
    }

    /// `g_{i j̄,k ℓ̄}`.
    pub fn d2_mixed(&self, i: usize, j: usize, k: usize, l: usize) -> Cx {
        self.jet(i, j).d2(k, self.n + l)
    }

    /// `g_{i j̄,k p}` (both derivatives holomorphic).
    pub fn d2_hol(&self, i: usize, j: usize, k: usize, p: usize) -> Cx {
        self.jet(i, j).d2(k, p)
    }

    /// `g_{i j̄,k̄ p̄}`.
    pub fn d2_anti(&self, i: usize, j: usize, k: usize, p: usize) -> Cx {
        self.jet(i, j).d2(self.n + k, self.n + p)
    }

    /// Largest deviation of `g` from the identity at the point.
    pub fn identity_residual(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { Cx::new(1.0, 0.0) } else { Cx::new(0.0, 0.0) };
                max = max.max((self.g[(i, j)] - target).norm());
            }
        }
        max
    }

    /// `‖g·g⁻¹ − 1‖` as a conditioning check.
    pub fn inverse_residual(&self) -> f64 {
        let p = &self.g * &self.g_inv;
        let mut max = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { Cx::new(1.0, 0.0) } else { Cx::new(0.0, 0.0) };
                max = max.max((p[(i, j)] - target).norm());
            }
        }
        max
    }

    /// Residual of the conjugation symmetry `g_{i j̄} = conj(g_{j ī})` through
    /// all stored derivative orders.
    pub fn conjugation_residual(&self) -> f64 {
        let n = self.n;
        let mut max = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                max = max.max((self.value(i, j) - self.value(j, i).conj()).norm());
                for k in 0..n {
                    max = max.max((self.d_hol(i, j, k) - self.d_anti(j, i, k).conj()).norm());
                    for p in 0..n {
                        max = max
                            .max((self.d2_mixed(i, j, k, p) - self.d2_mixed(j, i, p, k).conj()).norm());
                        max = max
                            .max((self.d2_hol(i, j, k, p) - self.d2_anti(j, i, k, p).conj()).norm());
                    }
                }
            }
        }
        max
    }
}

fn require_normalized(mj: &MetricJets, tol: f64) -> Result<()> {
    let r = mj.identity_residual();
    if r > tol {
        return Err(Error::ConstraintViolation(format!(
            "point formulas need g = identity at the point (residual {r:.3e}); normalize first"
        )));
    }
    Ok(())
}

/// Chern torsion components at the (normalized) point.
pub fn chern_torsion_at(mj: &MetricJets, tol: f64) -> Result<Torsion> {
    require_normalized(mj, tol)?;
    let n = mj.n;
    let mut t = Torsion::zeros(n);
    for j in 0..n {
        for i in 0..n {
            for k in i + 1..n {
                let mut v = Cx::new(0.0, 0.0);
                for l in 0..n {
                    v += (mj.d_hol(k, l, i) - mj.d_hol(i, l, k)) * mj.g_inv[(l, j)];
                }
                t.set(j, i, k, 0.5 * v);
            }
        }
    }
    Ok(t)
}

/// Coordinate derivatives `∂_p T^j_{ik}` and `∂_p̄ T^j_{ik}` of the Chern
/// torsion at the point, from second derivatives of `g`.
#[derive(Debug, Clone)]
pub struct TorsionPointDerivatives {
    n: usize,
    d_hol: Vec<Cx>,
    d_anti: Vec<Cx>,
}

impl TorsionPointDerivatives {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `∂_p T^j_{ik}`.
    pub fn d_hol(&self, j: usize, i: usize, k: usize, p: usize) -> Cx {
        self.d_hol[((j * self.n + i) * self.n + k) * self.n + p]
    }

    /// `∂_p̄ T^j_{ik}`.
    pub fn d_anti(&self, j: usize, i: usize, k: usize, p: usize) -> Cx {
        self.d_anti[((j * self.n + i) * self.n + k) * self.n + p]
    }
}

pub fn chern_torsion_derivatives_at(mj: &MetricJets, tol: f64) -> Result<TorsionPointDerivatives> {
    require_normalized(mj, tol)?;
    let n = mj.n;
    // ∂ g^{ℓ̄ j} = −Σ_{r,s} g^{ℓ̄ r} (∂ g_{r s̄}) g^{s̄ j}
    let dginv = |p: usize, barred: bool| -> DMatrix<Cx> {
        let dg = DMatrix::from_fn(n, n, |r, s| {
            if barred {
                mj.d_anti(r, s, p)
            } else {
                mj.d_hol(r, s, p)
            }
        });
        -(&mj.g_inv * dg * &mj.g_inv)
    };
    let mut d_hol = vec![Cx::new(0.0, 0.0); n * n * n * n];
    let mut d_anti = vec![Cx::new(0.0, 0.0); n * n * n * n];
    for p in 0..n {
        let dinv_h = dginv(p, false);
        let dinv_a = dginv(p, true);
        for j in 0..n {
            for i in 0..n {
                for k in 0..n {
                    let mut vh = Cx::new(0.0, 0.0);
                    let mut va = Cx::new(0.0, 0.0);
                    for l in 0..n {
                        let first = mj.d_hol(k, l, i) - mj.d_hol(i, l, k);
                        vh += (mj.d2_hol(k, l, i, p) - mj.d2_hol(i, l, k, p)) * mj.g_inv[(l, j)]
                            + first * dinv_h[(l, j)];
                        va += (mj.d2_mixed(k, l, i, p) - mj.d2_mixed(i, l, k, p)) * mj.g_inv[(l, j)]
                            + first * dinv_a[(l, j)];
                    }
                    d_hol[((j * n + i) * n + k) * n + p] = 0.5 * vh;
                    d_anti[((j * n + i) * n + k) * n + p] = 0.5 * va;
                }
            }
        }
    }
    Ok(TorsionPointDerivatives { n, d_hol, d_anti })
}

/// Max-norm residuals of the pointwise Bismut-parallelism conditions, along
/// holomorphic and antiholomorphic directions.
#[derive(Debug, Clone, Copy)]
pub struct BtpPointResiduals {
    pub holomorphic: f64,
    pub antiholomorphic: f64,
}

impl BtpPointResiduals {
    pub fn max(&self) -> f64 {
        self.holomorphic.max(self.antiholomorphic)
    }
}

pub fn btp_residual_at(
    mj: &MetricJets,
    t: &Torsion,
    dt: &TorsionPointDerivatives,
    tol: f64,
) -> Result<BtpPointResiduals> {
    require_normalized(mj, tol)?;
    let n = mj.n;
    let mut hol = 0.0f64;
    let mut anti = 0.0f64;
    for l in 0..n {
        for j in 0..n {
            for i in 0..n {
                for k in 0..n {
                    let mut rhs = Cx::new(0.0, 0.0);
                    for r in 0..n {
                        rhs += mj.d_hol(l, r, i) * t.t(j, r, k) + mj.d_hol(l, r, k) * t.t(j, i, r)
                            - mj.d_hol(l, j, r) * t.t(r, i, k);
                    }
                    hol = hol.max((dt.d_hol(j, i, k, l) - rhs).norm());
                    let mut rhs = Cx::new(0.0, 0.0);
                    for r in 0..n {
                        rhs += t.t(j, i, r) * t.t(k, l, r).conj() - t.t(j, k, r) * t.t(i, l, r).conj()
                            + t.t(r, i, k) * t.t(r, j, l).conj();
                    }
                    anti = anti.max((dt.d_anti(j, i, k, l) - 2.0 * rhs).norm());
                }
            }
        }
    }
    Ok(BtpPointResiduals { holomorphic: hol, antiholomorphic: anti })
}

/// Chern curvature at the point; `mixed(k, l, i, j) = R^c_{k ℓ̄ i j̄}`.
pub fn chern_curvature_at(mj: &MetricJets, tol: f64) -> Result<Curvature4Tensor> {
    require_normalized(mj, tol)?;
    let n = mj.n;
    Ok(Curvature4Tensor::from_mixed_block(n, CurvatureKind::Chern, |k, l, i, j| {
        let mut v = -mj.d2_mixed(i, j, k, l);
        for p in 0..n {
            for q in 0..n {
                v += mj.d_hol(i, p, k) * mj.d_hol(j, q, l).conj() * mj.g_inv[(p, q)];
            }
        }
        v
    }))
}

/// Levi-Civita curvature at a torsion-parallel point, with sectional and
/// Ricci evaluators. Real tangent vectors are passed by their `(1,0)`-parts:
/// `x = X + conj(X)`.
#[derive(Debug, Clone)]
pub struct RiemannianPointCurvature {
    n: usize,
    r20: Vec<Cx>,
    r11: Vec<Cx>,
    /// Set when the point fails the Bismut-parallelism residual check; the
    /// algebraic transcription of the curvature is exact only when the check
    /// passes.
    pub btp_warning: bool,
}

impl RiemannianPointCurvature {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `R_{i j k ℓ̄}`.
    pub fn r20(&self, i: usize, j: usize, k: usize, l: usize) -> Cx {
        self.r20[((i * self.n + j) * self.n + k) * self.n + l]
    }

    /// `R_{i j̄ k ℓ̄}`.
    pub fn r11(&self, i: usize, j: usize, k: usize, l: usize) -> Cx {
        self.r11[((i * self.n + j) * self.n + k) * self.n + l]
    }

    /// Residual of the pair symmetry `R_{i j̄ k ℓ̄} = R_{k ℓ̄ i j̄}`.
    pub fn pair_symmetry_residual(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    for l in 0..self.n {
                        max = max.max((self.r11(i, j, k, l) - self.r11(k, l, i, j)).norm());
                    }
                }
            }
        }
        max
    }

    /// `R(x, y, y, x)` for real tangent vectors `x = X + X̄`, `y = Y + Ȳ`.
    pub fn r_xyyx(&self, x: &[Cx], y: &[Cx]) -> Result<f64> {
        let n = self.n;
        if x.len() != n {
            return Err(Error::DimensionMismatch(x.len(), n));
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch(y.len(), n));
        }
        let mut s12 = Cx::new(0.0, 0.0);
        let mut s3 = Cx::new(0.0, 0.0);
        let mut s4 = Cx::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let xy = x[i] * y[j] - y[i] * x[j];
                for k in 0..n {
                    for l in 0..n {
                        let r = self.r11(i, j, k, l);
                        s12 += r
                            * (-2.0 * x[i] * x[j].conj() * y[k] * y[l].conj()
                                + 4.0 * x[i] * y[j].conj() * y[k] * x[l].conj());
                        s3 += r * x[i] * y[j].conj() * x[k] * y[l].conj();
                        s4 += self.r20(i, j, k, l)
                            * xy
                            * (y[k] * x[l].conj() - x[k] * y[l].conj());
                    }
                }
            }
        }
        Ok(s12.re - 2.0 * s3.re + 2.0 * s4.re)
    }

    /// Sectional curvature of the real 2-plane spanned by `x`, `y`.
    pub fn sectional(&self, x: &[Cx], y: &[Cx]) -> Result<f64> {
        let xx = 2.0 * x.iter().map(|c| c.norm_sqr()).sum::<f64>();
        let yy = 2.0 * y.iter().map(|c| c.norm_sqr()).sum::<f64>();
        let xy = 2.0 * x.iter().zip(y).map(|(a, b)| (a * b.conj()).re).sum::<f64>();
        let gram = xx * yy - xy * xy;
        if gram <= 1e-14 * (xx * yy).max(1.0) {
            return Err(Error::BadParameter("degenerate 2-plane".into()));
        }
        Ok(self.r_xyyx(x, y)? / gram)
    }

    /// Ricci curvature in the direction of `x`, tracing over the orthonormal
    /// real frame built from the coordinate frame.
    pub fn ricci(&self, x: &[Cx]) -> Result<f64> {
        let n = self.n;
        if x.len() != n {
            return Err(Error::DimensionMismatch(x.len(), n));
        }
        let xx = 2.0 * x.iter().map(|c| c.norm_sqr()).sum::<f64>();
        if xx == 0.0 {
            return Err(Error::BadParameter("zero direction".into()));
        }
        let inv_sqrt2 = Cx::new(1.0 / 2.0_f64.sqrt(), 0.0);
        let mut total = 0.0;
        for i in 0..n {
            let mut y = vec![Cx::new(0.0, 0.0); n];
            y[i] = inv_sqrt2;
            total += self.r_xyyx(x, &y)?;
            y[i] = inv_sqrt2 * Cx::new(0.0, 1.0);
            total += self.r_xyyx(x, &y)?;
        }
        Ok(total / xx)
    }
}

pub fn riemannian_at(
    mj: &MetricJets,
    t: &Torsion,
    dt: &TorsionPointDerivatives,
    rc: &Curvature4Tensor,
    tol: f64,
) -> Result<RiemannianPointCurvature> {
    require_normalized(mj, tol)?;
    let n = mj.n;
    let btp_warning = btp_residual_at(mj, t, dt, tol)?.max() > tol;
    let mut r20 = vec![Cx::new(0.0, 0.0); n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    // Chern-covariant ∂_k derivative of T^ℓ_{ij} at g = 1.
                    let mut semi = dt.d_hol(l, i, j, k);
                    for r in 0..n {
                        semi += t.t(r, i, j) * mj.d_hol(r, l, k)
                            - mj.d_hol(i, r, k) * t.t(l, r, j)
                            - mj.d_hol(j, r, k) * t.t(l, i, r);
                    }
                    let mut v = semi;
                    for r in 0..n {
                        v += t.t(l, r, i) * t.t(r, j, k) - t.t(l, r, j) * t.t(r, i, k);
                    }
                    r20[((i * n + j) * n + k) * n + l] = v;
                }
            }
        }
    }
    let mut r11 = vec![Cx::new(0.0, 0.0); n * n * n * n];
    for k in 0..n {
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = 0.5 * (rc.mixed(i, l, k, j) + rc.mixed(k, j, i, l));
                    for r in 0..n {
                        v += t.t(r, i, k) * t.t(r, j, l).conj()
                            - t.t(j, k, r) * t.t(i, l, r).conj()
                            - t.t(l, i, r) * t.t(k, j, r).conj();
                    }
                    r11[((k * n + l) * n + i) * n + j] = v;
                }
            }
        }
    }
    Ok(RiemannianPointCurvature { n, r20, r11, btp_warning })
}

/// Point-local condition report: flags and residuals for a coordinate metric
/// at its (normalized) base point.
#[derive(Debug, Clone)]
pub struct PointReport {
    pub n: usize,
    pub tol: f64,
    /// True when a linear coordinate change was applied to bring `g` to the
    /// identity at the point first.
    pub normalized: bool,
    pub identity_residual: f64,
    pub conjugation_residual: f64,
    pub torsion: Torsion,
    pub eta: Vec<Cx>,
    /// Torsion vanishes at the point.
    pub kahler: Flag,
    /// `η` vanishes at the point.
    pub balanced: Flag,
    /// Rank-one torsion shape `T^j_{ik} = (η_k δ_{ij} − η_i δ_{kj})/(n−1)`.
    pub lck_shape: Flag,
    /// Both parallel-transport residuals at the point.
    pub btp: Flag,
    pub btp_components: BtpPointResiduals,
    /// LCK shape together with parallel torsion.
    pub vaisman: Flag,
    pub b_eigenvalues: Vec<f64>,
    pub rank_b: usize,
    pub chern: Curvature4Tensor,
    pub chern_conjugate_residual: f64,
    pub riemannian: RiemannianPointCurvature,
    pub riemann_pair_residual: f64,
}

fn flag(residual: f64, tol: f64) -> Flag {
    Flag { holds: residual <= tol, residual }
}

/// Run the full point-local pipeline: validate, normalize if needed, then
/// compute torsion, its derivatives, both curvatures, and the labels.
pub fn point_report(m: &CoordinateMetric, tol: f64) -> Result<PointReport> {
    m.validate(tol)?;
    let base = m.jets()?;
    let (mj, normalized) = if base.identity_residual() > tol {
        (m.normalize_point(tol)?.jets()?, true)
    } else {
        (base, false)
    };
    require_normalized(&mj, tol)?;
    let n = mj.n();
    let t = chern_torsion_at(&mj, tol)?;
    let dt = chern_torsion_derivatives_at(&mj, tol)?;
    let rc = chern_curvature_at(&mj, tol)?;
    let btp_components = btp_residual_at(&mj, &t, &dt, tol)?;
    let riemannian = riemannian_at(&mj, &t, &dt, &rc, tol)?;
    let eta = t.eta();

    let kahler = flag(t.norm_inf(), tol);
    let balanced = flag(eta.iter().map(|c| c.norm()).fold(0.0, f64::max), tol);

    let shape_res = if n == 1 {
        t.norm_inf()
    } else {
        let scale = 1.0 / (n as f64 - 1.0);
        let mut res = 0.0f64;
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
                    res = res.max((t.t(j, i, k) - model).norm());
                }
            }
        }
        res
    };
    let lck_shape = flag(shape_res, tol);
    let btp = flag(btp_components.max(), tol);
    let vaisman = Flag {
        holds: lck_shape.holds && btp.holds,
        residual: lck_shape.residual.max(btp.residual),
    };

    let b = DMatrix::from_fn(n, n, |k, l| {
        let mut v = Cx::new(0.0, 0.0);
        for r in 0..n {
            for s in 0..n {
                v += t.t(l, r, s) * t.t(k, r, s).conj();
            }
        }
        v
    });
    let (b_eigenvalues, _) = linalg::hermitian_eigen_desc(&b);
    let thr = tol * b_eigenvalues.first().copied().unwrap_or(0.0).max(1.0);
    let rank_b = b_eigenvalues.iter().filter(|v| **v > thr).count();

    Ok(PointReport {
        n,
        tol,
        normalized,
        identity_residual: mj.identity_residual(),
        conjugation_residual: mj.conjugation_residual(),
        eta,
        kahler,
        balanced,
        lck_shape,
        btp,
        btp_components,
        vaisman,
        b_eigenvalues,
        rank_b,
        chern_conjugate_residual: rc.pairwise_conjugate_residual(),
        riemann_pair_residual: riemannian.pair_symmetry_residual(),
        torsion: t,
        chern: rc,
        riemannian,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr;

    fn cx(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    fn constant_metric(n: usize, scale: f64, point: Vec<Cx>) -> CoordinateMetric {
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                entries.push(Expr::real(if i == j { scale } else { 0.0 }));
            }
        }
        CoordinateMetric::new(n, entries, point).unwrap()
    }

    fn fubini_study(n: usize) -> CoordinateMetric {
        // g_{i j̄} = ((1+|z|²) δ_{ij} − zb_i z_j) / (1+|z|²)², identity at 0.
        let norm2 = {
            let mut e = Expr::real(1.0);
            for k in 0..n {
                e = Expr::add(e, Expr::mul(Expr::var(k), Expr::barred_var(k)));
            }
            e
        };
        let denom = Expr::mul(norm2.clone(), norm2.clone());
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let num = if i == j {
                    Expr::sub(
                        norm2.clone(),
                        Expr::mul(Expr::barred_var(i), Expr::var(j)),
                    )
                } else {
                    Expr::Neg(Box::new(Expr::mul(Expr::barred_var(i), Expr::var(j))))
                };
                entries.push(Expr::div(num, denom.clone()));
            }
        }
        CoordinateMetric::new(n, entries, vec![cx(0.0, 0.0); n]).unwrap()
    }

    #[test]
    fn euclidean_point_quantities_vanish() {
        let m = constant_metric(2, 1.0, vec![cx(0.3, 0.1), cx(-0.2, 0.0)]);
        m.validate(1e-9).unwrap();
        let mj = m.jets().unwrap();
        assert!(mj.identity_residual() < 1e-15);
        assert!(mj.conjugation_residual() < 1e-15);
        let t = chern_torsion_at(&mj, 1e-9).unwrap();
        assert!(t.norm_inf() < 1e-15);
        let dt = chern_torsion_derivatives_at(&mj, 1e-9).unwrap();
        let res = btp_residual_at(&mj, &t, &dt, 1e-9).unwrap();
        assert!(res.max() < 1e-15);
        let rc = chern_curvature_at(&mj, 1e-9).unwrap();
        assert!(rc.norm_inf() < 1e-15);
        let r = riemannian_at(&mj, &t, &dt, &rc, 1e-9).unwrap();
        assert!(!r.btp_warning);
        let x = vec![cx(1.0, 0.0), cx(0.0, 0.0)];
        assert!(r.ricci(&x).unwrap().abs() < 1e-15);
    }

    #[test]
    fn scaled_identity_normalizes() {
        let m = constant_metric(2, 2.0, vec![cx(0.0, 0.0); 2]);
        let nm = m.normalize_point(1e-9).unwrap();
        let mj = nm.jets().unwrap();
        assert!(mj.identity_residual() < 1e-12);
    }

    #[test]
    fn translation_and_shear_normalization() {
        // g = 2 + z1 + zb1 at p = 0: Hermitian, positive; after normalization
        // the origin value is 1 and the first derivative scales by (1/√2)³.
        let e = Expr::add(
            Expr::real(2.0),
            Expr::add(Expr::var(0), Expr::barred_var(0)),
        );
        let m = CoordinateMetric::new(1, vec![e], vec![cx(0.0, 0.0)]).unwrap();
        let nm = m.normalize_point(1e-9).unwrap();
        let mj = nm.jets().unwrap();
        assert!(mj.identity_residual() < 1e-12);
        let expected = 1.0 / (2.0 * 2.0_f64.sqrt());
        assert!((mj.d_hol(0, 0, 0) - cx(expected, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn reciprocal_metric_curvature() {
        // g = 1/(1 + z zb): R^c_{1 1̄ 1 1̄} = −g_{1 1̄,1 1̄} + |g_{1 1̄,1}|² g^{1̄ 1} = 1 at 0.
        let e = Expr::div(
            Expr::real(1.0),
            Expr::add(Expr::real(1.0), Expr::mul(Expr::var(0), Expr::barred_var(0))),
        );
        let m = CoordinateMetric::new(1, vec![e], vec![cx(0.0, 0.0)]).unwrap();
        let mj = m.jets().unwrap();
        assert!((mj.d2_mixed(0, 0, 0, 0) - cx(-1.0, 0.0)).norm() < 1e-12);
        let rc = chern_curvature_at(&mj, 1e-9).unwrap();
        assert!((rc.mixed(0, 0, 0, 0) - cx(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn fubini_study_is_kahler_at_origin() {
        let m = fubini_study(2);
        m.validate(1e-9).unwrap();
        let mj = m.jets().unwrap();
        assert!(mj.identity_residual() < 1e-14);
        let t = chern_torsion_at(&mj, 1e-9).unwrap();
        assert!(t.norm_inf() < 1e-12);
        let dt = chern_torsion_derivatives_at(&mj, 1e-9).unwrap();
        let res = btp_residual_at(&mj, &t, &dt, 1e-9).unwrap();
        assert!(res.max() < 1e-12);
        let rc = chern_curvature_at(&mj, 1e-9).unwrap();
        // R^c_{i j̄ k ℓ̄} = δ_ij δ_kℓ + δ_iℓ δ_kj for this normalization.
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let want = ((i == j && k == l) as u32 + (i == l && k == j) as u32) as f64;
                        assert!((rc.mixed(i, j, k, l) - cx(want, 0.0)).norm() < 1e-12);
                    }
                }
            }
        }
        assert!(rc.pairwise_conjugate_residual() < 1e-12);
        let r = riemannian_at(&mj, &t, &dt, &rc, 1e-9).unwrap();
        assert!(!r.btp_warning);
        assert!(r.pair_symmetry_residual() < 1e-12);
        // Kähler: torsion terms drop, R_{1 1̄ 1 1̄} = R^c_{1 1̄ 1 1̄} = 2.
        assert!((r.r11(0, 0, 0, 0) - cx(2.0, 0.0)).norm() < 1e-12);
        for v in &r.r20 {
            assert!(v.norm() < 1e-12);
        }
        // Holomorphic sectional curvature 2 in every coordinate direction.
        let x = vec![cx(1.0, 0.0), cx(0.0, 0.0)];
        let y = vec![cx(0.0, 1.0), cx(0.0, 0.0)];
        let sec = r.sectional(&x, &y).unwrap();
        assert!((sec - 2.0).abs() < 1e-12, "sec = {sec}");
    }

    #[test]
    fn hermitian_violation_detected() {
        let e = Expr::add(Expr::real(1.0), Expr::var(0));
        let m = CoordinateMetric::new(1, vec![e], vec![cx(0.0, 0.5)]).unwrap();
        assert!(matches!(m.validate(1e-9), Err(Error::ConstraintViolation(_))));
    }

    #[test]
    fn indefinite_metric_rejected() {
        let m = constant_metric(2, -1.0, vec![cx(0.0, 0.0); 2]);
        assert!(matches!(m.validate(1e-9), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn point_report_kahler_and_round_metric() {
        let r = point_report(&fubini_study(2), 1e-9).unwrap();
        assert!(r.kahler.holds);
        assert!(r.balanced.holds);
        assert!(!r.normalized);
        assert_eq!(r.rank_b, 0);
        assert!(r.chern_conjugate_residual < 1e-12);

        // g = δ_ij/|z|² at (1,0): parallel rank-one torsion, η = (1/2, 0).
        let norm2 = Expr::add(
            Expr::mul(Expr::var(0), Expr::barred_var(0)),
            Expr::mul(Expr::var(1), Expr::barred_var(1)),
        );
        let mut entries = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                entries.push(if i == j {
                    Expr::div(Expr::real(1.0), norm2.clone())
                } else {
                    Expr::real(0.0)
                });
            }
        }
        let m =
            CoordinateMetric::new(2, entries, vec![cx(1.0, 0.0), cx(0.0, 0.0)]).unwrap();
        let r = point_report(&m, 1e-9).unwrap();
        assert!(!r.kahler.holds);
        assert!(!r.balanced.holds);
        assert!(r.lck_shape.holds, "shape residual {}", r.lck_shape.residual);
        assert!(r.btp.holds, "btp residual {}", r.btp_components.max());
        assert!(r.vaisman.holds);
        assert!((r.eta[0] - cx(0.5, 0.0)).norm() < 1e-12);
        assert!(r.eta[1].norm() < 1e-12);
        assert_eq!(r.rank_b, 1);
        assert!((r.b_eigenvalues[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_variable_rejected() {
        let e = expr::parse("z3").unwrap();
        let r = CoordinateMetric::new(2, vec![e.clone(), e.clone(), e.clone(), e], vec![
            cx(0.0, 0.0),
            cx(0.0, 0.0),
        ]);
        assert!(matches!(r, Err(Error::IndexOutOfRange { .. })));
    }
}
