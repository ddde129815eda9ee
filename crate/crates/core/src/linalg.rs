//! Dense linear-algebra utilities: Hermitian eigendecomposition with a
//! deterministic ordering, unitary diagonalization of normal matrices via
//! commuting Hermitian parts, and Takagi factorization of complex symmetric
//! matrices.

use nalgebra::{DMatrix, DVector};

use crate::{Cx, Error, Result};

fn czero() -> Cx {
    Cx::new(0.0, 0.0)
}

pub fn max_abs(m: &DMatrix<Cx>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Gram-Schmidt by QR with the phase convention that makes the triangular
/// factor's diagonal real positive; columns spanning the same flag are
/// reproduced exactly (in particular a unit first column is preserved).
pub fn orthonormalize(m: &DMatrix<Cx>) -> DMatrix<Cx> {
    let n = m.nrows();
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n.min(m.ncols()) {
        let d = r[(j, j)];
        if d.norm() > 1e-300 {
            let phase = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending,
/// each eigenvector's largest-magnitude entry made real positive.
pub fn hermitian_eigen_desc(m: &DMatrix<Cx>) -> (Vec<f64>, DMatrix<Cx>) {
    let n = m.nrows();
    let sym = nalgebra::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        sym.eigenvalues[b]
            .partial_cmp(&sym.eigenvalues[a])
            .expect("finite eigenvalues")
    });
    let vals: Vec<f64> = order.iter().map(|&i| sym.eigenvalues[i]).collect();
    let mut vecs = DMatrix::<Cx>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = sym.eigenvectors.column(src);
        let pivot = (0..n)
            .max_by(|&a, &b| {
                col[a]
                    .norm()
                    .partial_cmp(&col[b].norm())
                    .expect("finite entries")
            })
            .unwrap_or(0);
        let p = col[pivot];
        let phase = if p.norm() > 1e-300 { p.conj() / p.norm() } else { Cx::new(1.0, 0.0) };
        for i in 0..n {
            vecs[(i, dst)] = col[i] * phase;
        }
    }
    (vals, vecs)
}

/// Group consecutive entries of a sorted slice whose gaps stay below `gap`.
fn clusters(vals: &[f64], gap: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || (vals[i] - vals[i - 1]).abs() > gap {
            out.push((start, i));
            start = i;
        }
    }
    out
}

/// Unitary diagonalization `M = V D V^*` of a normal matrix, through the
/// commuting Hermitian parts `H = (M + M^*)/2` and `K = (M − M^*)/(2i)`:
/// eigendecompose `H`, then diagonalize `K` compressed to each eigenvalue
/// cluster of `H`. Eigenpairs are sorted by descending modulus, ties by
/// descending real then imaginary part.
pub fn diagonalize_normal(m: &DMatrix<Cx>, tol: f64) -> Result<(Vec<Cx>, DMatrix<Cx>)> {
    let n = m.nrows();
    let scale = max_abs(m).max(1.0);
    let commutator = m * m.adjoint() - m.adjoint() * m;
    let res = max_abs(&commutator);
    if res > tol.max(1e-10) * scale * scale {
        return Err(Error::NotNormal(res));
    }
    let h = (m + m.adjoint()).scale(0.5);
    let k = (m - m.adjoint()).scale(0.5) * Cx::new(0.0, -1.0);
    let (hvals, hvecs) = hermitian_eigen_desc(&h);
    let mut v = hvecs.clone();
    let gap = 1e-6 * scale;
    for (lo, hi) in clusters(&hvals, gap) {
        let w = hi - lo;
        if w == 1 {
            continue;
        }
        let block = hvecs.columns(lo, w);
        let kc = block.adjoint() * &k * block;
        let kc = (&kc + kc.adjoint()).scale(0.5);
        let (_, u) = hermitian_eigen_desc(&kc);
        let refined = block * u;
        for j in 0..w {
            for i in 0..n {
                v[(i, lo + j)] = refined[(i, j)];
            }
        }
    }
    let mut pairs: Vec<(Cx, DVector<Cx>)> = (0..n)
        .map(|j| {
            let col = v.column(j).into_owned();
            let lambda = col.adjoint() * m * &col;
            (lambda[(0, 0)], col)
        })
        .collect();
    pairs.sort_by(|a, b| {
        let ka = (-a.0.norm(), -a.0.re, -a.0.im);
        let kb = (-b.0.norm(), -b.0.re, -b.0.im);
        ka.partial_cmp(&kb).expect("finite eigenvalues")
    });
    let vals: Vec<Cx> = pairs.iter().map(|p| p.0).collect();
    let mut vecs = DMatrix::<Cx>::zeros(n, n);
    for (j, (_, col)) in pairs.iter().enumerate() {
        vecs.set_column(j, col);
    }
    let d = DMatrix::from_diagonal(&DVector::from_vec(vals.clone()));
    let recon = max_abs(&(&vecs * d * vecs.adjoint() - m));
    if recon > tol.max(1e-9) * scale {
        return Err(Error::Factorization(format!(
            "normal diagonalization residual {recon:.3e}"
        )));
    }
    Ok((vals, vecs))
}

/// Simultaneous orthogonal diagonalization of two commuting real symmetric
/// matrices: returns `O` with `OᵗXO` and `OᵗYO` both diagonal.
fn diagonalize_commuting_real(x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let ex = nalgebra::SymmetricEigen::new(x.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        ex.eigenvalues[b]
            .partial_cmp(&ex.eigenvalues[a])
            .expect("finite eigenvalues")
    });
    let vals: Vec<f64> = order.iter().map(|&i| ex.eigenvalues[i]).collect();
    let mut o = DMatrix::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        o.set_column(dst, &ex.eigenvectors.column(src).into_owned());
    }
    let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for (lo, hi) in clusters(&vals, 1e-8 * scale) {
        let w = hi - lo;
        if w == 1 {
            continue;
        }
        let block = o.columns(lo, w).into_owned();
        let yc = block.transpose() * y * &block;
        let yc = (&yc + yc.transpose()).scale(0.5);
        let ey = nalgebra::SymmetricEigen::new(yc);
        let refined = block * ey.eigenvectors;
        for j in 0..w {
            for i in 0..n {
                o[(i, lo + j)] = refined[(i, j)];
            }
        }
    }
    o
}

/// Takagi factorization `N = U · diag(a) · ᵗU` of a complex symmetric matrix,
/// with `a_1 ≥ a_2 ≥ … ≥ 0` and `U` unitary.
///
/// Route: eigendecompose the Hermitian PSD matrix `N N^*`, whose eigenvalues
/// are `a_i²`. On a simple eigenspace the con-eigenvector is obtained by a
/// half-phase correction; on a degenerate cluster the compressed matrix
/// `S = V^* N conj(V)` is complex symmetric with `S conj(S) = a² I`, so its
/// real and imaginary parts commute and a simultaneous real orthogonal
/// diagonalization followed by half-phase corrections finishes the block.
pub fn takagi(nmat: &DMatrix<Cx>, tol: f64) -> Result<(Vec<f64>, DMatrix<Cx>)> {
    let n = nmat.nrows();
    let scale = max_abs(nmat).max(1.0);
    let sym_res = max_abs(&(nmat - nmat.transpose()));
    if sym_res > tol.max(1e-10) * scale {
        return Err(Error::Factorization(format!(
            "matrix is not symmetric (residual {sym_res:.3e})"
        )));
    }
    let a = nmat * nmat.adjoint();
    let (avals, avecs) = hermitian_eigen_desc(&a);
    let mut sigmas = vec![0.0f64; n];
    let mut u = DMatrix::<Cx>::zeros(n, n);
    let gap = 1e-8 * scale * scale;
    for (lo, hi) in clusters(&avals, gap) {
        let w = hi - lo;
        let sigma2 = avals[lo..hi].iter().sum::<f64>() / w as f64;
        let sigma = sigma2.max(0.0).sqrt();
        let block = avecs.columns(lo, w).into_owned();
        if sigma <= 1e-8 * scale {
            // Kernel block: N conj(v) = 0 already, any orthonormal basis works.
            // Re-extract σ linearly in N; the Gram eigenvalue sqrt would carry
            // a spurious ~1e-8 floor here.
            for j in 0..w {
                let v = block.column(j).into_owned();
                sigmas[lo + j] = (nmat * v.map(|c| c.conj())).norm();
                u.set_column(lo + j, &v);
            }
            continue;
        }
        if w == 1 {
            let v = block.column(0).into_owned();
            let wvec = nmat * v.map(|c| c.conj());
            // w = μ v with |μ| = σ; u = e^{iθ/2} v turns μ into σ.
            let mu = (v.adjoint() * &wvec)[(0, 0)];
            let half = Cx::from_polar(1.0, mu.arg() / 2.0);
            sigmas[lo] = mu.norm();
            u.set_column(lo, &(v * half));
            continue;
        }
        let s = block.adjoint() * nmat * block.map(|c| c.conj());
        let s = (&s + s.transpose()).scale(0.5);
        let x = s.map(|c| c.re);
        let y = s.map(|c| c.im);
        let o = diagonalize_commuting_real(&x, &y);
        let oc = o.map(|r| Cx::new(r, 0.0));
        let diag = oc.transpose() * &s * &oc;
        let rotated = block * oc;
        for j in 0..w {
            let mu = diag[(j, j)];
            let half = Cx::from_polar(1.0, mu.arg() / 2.0);
            sigmas[lo + j] = mu.norm();
            u.set_column(lo + j, &(rotated.column(j) * half));
        }
    }
    // Stable descending sort (clusters already come out descending).
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigmas[j].partial_cmp(&sigmas[i]).expect("finite singular values"));
    let vals: Vec<f64> = order.iter().map(|&i| sigmas[i]).collect();
    let mut uu = DMatrix::<Cx>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        uu.set_column(dst, &u.column(src).into_owned());
    }
    let d = DMatrix::from_fn(n, n, |i, j| if i == j { Cx::new(vals[i], 0.0) } else { czero() });
    let recon = max_abs(&(&uu * d * uu.transpose() - nmat));
    if recon > tol.max(1e-8) * scale {
        return Err(Error::Factorization(format!(
            "Takagi residual {recon:.3e}"
        )));
    }
    Ok((vals, uu))
}

/// Unitary completion: a unitary matrix whose last column is the given unit
/// vector.
pub fn unitary_with_last_column(v: &DVector<Cx>) -> DMatrix<Cx> {
    let n = v.nrows();
    let mut cols = DMatrix::<Cx>::zeros(n, n);
    cols.set_column(0, v);
    // Complete with standard basis vectors, skipping the one most parallel
    // to v to keep the system well-conditioned.
    let pivot = (0..n)
        .max_by(|&a, &b| v[a].norm().partial_cmp(&v[b].norm()).expect("finite entries"))
        .unwrap_or(0);
    let mut j = 1;
    for k in 0..n {
        if k == pivot {
            continue;
        }
        cols[(k, j)] = Cx::new(1.0, 0.0);
        j += 1;
    }
    let q = orthonormalize(&cols);
    let mut out = DMatrix::<Cx>::zeros(n, n);
    for c in 0..n {
        let dst = if c == 0 { n - 1 } else { c - 1 };
        out.set_column(dst, &q.column(c).into_owned());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    #[test]
    fn orthonormalize_produces_unitary() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                cx(1.0, 0.5),
                cx(0.2, -1.0),
                cx(0.0, 0.3),
                cx(-0.4, 0.0),
                cx(1.0, 1.0),
                cx(0.7, 0.2),
                cx(0.1, 0.1),
                cx(0.0, -0.5),
                cx(2.0, 0.0),
            ],
        );
        let q = orthonormalize(&m);
        let res = max_abs(&(&q * q.adjoint() - DMatrix::<Cx>::identity(3, 3)));
        assert!(res < 1e-12);
    }

    #[test]
    fn normal_diagonalization_recovers_skew_plus_diag() {
        // A normal (non-Hermitian) matrix with a degenerate |λ| pair.
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![
            cx(1.0, 1.0),
            cx(1.0, 1.0),
            cx(0.0, -2.0),
        ]));
        let g = DMatrix::from_row_slice(
            3,
            3,
            &[
                cx(1.0, 0.2),
                cx(0.3, -0.4),
                cx(0.0, 1.0),
                cx(0.5, 0.0),
                cx(1.0, 0.8),
                cx(-0.2, 0.1),
                cx(0.0, 0.6),
                cx(0.9, 0.0),
                cx(0.4, -0.3),
            ],
        );
        let v0 = orthonormalize(&g);
        let m = &v0 * &d * v0.adjoint();
        let (vals, v) = diagonalize_normal(&m, 1e-10).unwrap();
        let dd = DMatrix::from_diagonal(&DVector::from_vec(vals));
        let res = max_abs(&(&v * dd * v.adjoint() - m));
        assert!(res < 1e-10, "residual {res}");
    }

    #[test]
    fn takagi_recovers_degenerate_spectrum() {
        let a = [0.5, 0.5, 0.0];
        let d = DMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                cx(a[i], 0.0)
            } else {
                cx(0.0, 0.0)
            }
        });
        let g = DMatrix::from_row_slice(
            3,
            3,
            &[
                cx(0.3, 0.7),
                cx(1.0, -0.4),
                cx(0.2, 1.0),
                cx(0.5, 0.1),
                cx(0.0, 0.8),
                cx(-1.2, 0.1),
                cx(0.4, 0.6),
                cx(0.9, 0.3),
                cx(0.4, -0.9),
            ],
        );
        let u0 = orthonormalize(&g);
        let m = &u0 * &d * u0.transpose();
        let (vals, u) = takagi(&m, 1e-10).unwrap();
        assert!((vals[0] - 0.5).abs() < 1e-10);
        assert!((vals[1] - 0.5).abs() < 1e-10);
        assert!(vals[2].abs() < 1e-10);
        let dd = DMatrix::from_fn(3, 3, |i, j| if i == j { cx(vals[i], 0.0) } else { czero() });
        let res = max_abs(&(&u * dd * u.transpose() - m));
        assert!(res < 1e-9, "residual {res}");
    }

    #[test]
    fn unitary_completion_places_vector_last() {
        let v = DVector::from_vec(vec![cx(0.6, 0.0), cx(0.0, 0.8), cx(0.0, 0.0)]);
        let u = unitary_with_last_column(&v);
        let res = max_abs(&(&u * u.adjoint() - DMatrix::<Cx>::identity(3, 3)));
        assert!(res < 1e-12);
        for i in 0..3 {
            assert!((u[(i, 2)] - v[i]).norm() < 1e-12);
        }
    }
}
