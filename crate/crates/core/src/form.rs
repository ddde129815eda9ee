//! Complex exterior algebra over a fixed unitary coframe.
//!
//! The algebra is generated by `φ_1, …, φ_n` and their conjugates
//! `φ̄_1, …, φ̄_n`. A [`Form`] is a finite sum of canonical monomials, each a
//! wedge of distinct generators in the fixed order
//! `φ_1 < … < φ_n < φ̄_1 < … < φ̄_n`, stored as a bitmask (unbarred generator
//! `i` at bit `i`, barred generator `i` at bit `n + i`) with a complex
//! coefficient. Reordering signs are produced by the sorting permutation
//! parity, so `wedge` is exactly antisymmetric on generators.
//!
//! Degree-2 forms evaluate on pairs of frame vectors with the alternating-sum
//! convention `(φ_a ∧ φ_b)(x, y) = φ_a(x) φ_b(y) − φ_a(y) φ_b(x)` and no
//! factorial normalization. Consequently the canonical coefficient of
//! `φ_i ∧ φ_j` (`i < j`) in a form `Σ_{i,j} T_{ij} φ_i ∧ φ_j` summed over all
//! index pairs with `T` antisymmetric is `2 T_{ij}`.
//!
//! Coefficients with magnitude below `1e-14` are dropped on the fly; this is
//! representation hygiene only, and every mathematical "is zero" decision in
//! the crate takes an explicit tolerance.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::{Cx, Error, Result};

/// Coefficients below this magnitude are elided from the term map.
const DUST: f64 = 1e-14;

/// Maximum supported complex dimension (masks are 32-bit).
pub const MAX_DIM: usize = 16;

/// A frame vector `e_i` or `ē_i` (0-based index).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameVector {
    pub index: usize,
    pub barred: bool,
}

impl FrameVector {
    pub fn unbarred(index: usize) -> Self {
        FrameVector { index, barred: false }
    }

    pub fn barred(index: usize) -> Self {
        FrameVector { index, barred: true }
    }

    fn bit(&self, n: usize) -> usize {
        self.index + if self.barred { n } else { 0 }
    }
}

/// An element of the complex exterior algebra on `2n` generators.
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    n: usize,
    terms: BTreeMap<u32, Cx>,
}

/// Parity sign accumulated when the generators of `m2` are merged below those
/// of `m1`: each generator of `m2` hops over every higher generator of `m1`.
fn merge_sign(m1: u32, m2: u32) -> f64 {
    let mut crossings = 0u32;
    let mut rest = m1;
    while rest != 0 {
        let b = rest.trailing_zeros();
        crossings += (m2 & ((1u32 << b) - 1)).count_ones();
        rest &= rest - 1;
    }
    if crossings % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl Form {
    /// The zero form.
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_DIM, "dimension {n} out of range");
        Form { n, terms: BTreeMap::new() }
    }

    /// A degree-0 form (constant).
    pub fn scalar(n: usize, c: Cx) -> Self {
        let mut f = Form::zero(n);
        f.add_term(0, c);
        f
    }

    /// The generator `φ_index` (or `φ̄_index` if `barred`), 0-based.
    pub fn generator(n: usize, index: usize, barred: bool) -> Result<Self> {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, n });
        }
        let mut f = Form::zero(n);
        f.add_term(1u32 << (index + if barred { n } else { 0 }), Cx::new(1.0, 0.0));
        Ok(f)
    }

    /// Wedge of generators in the given order times `coeff`. Repeated
    /// generators yield the zero form.
    pub fn monomial(n: usize, gens: &[(usize, bool)], coeff: Cx) -> Result<Self> {
        let mut f = Form::zero(n);
        let mut mask = 0u32;
        let mut sign = 1.0;
        for &(index, barred) in gens {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n });
            }
            let bit = 1u32 << (index + if barred { n } else { 0 });
            if mask & bit != 0 {
                return Ok(f);
            }
            // `bit` is appended on the right; it must hop over every
            // already-placed generator above it.
            sign *= merge_sign(mask, bit);
            mask |= bit;
        }
        f.add_term(mask, coeff * sign);
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn term_iter(&self) -> impl Iterator<Item = (u32, Cx)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    fn add_term(&mut self, mask: u32, c: Cx) {
        let entry = self.terms.entry(mask).or_insert(Cx::new(0.0, 0.0));
        *entry += c;
        if entry.norm() < DUST {
            self.terms.remove(&mask);
        }
    }

    /// Canonical coefficient of the monomial given by `gens` (order-sensitive:
    /// an odd permutation of the generators flips the sign).
    pub fn coeff(&self, gens: &[(usize, bool)]) -> Cx {
        let mut mask = 0u32;
        let mut sign = 1.0;
        for &(index, barred) in gens {
            if index >= self.n {
                return Cx::new(0.0, 0.0);
            }
            let bit = 1u32 << (index + if barred { self.n } else { 0 });
            if mask & bit != 0 {
                return Cx::new(0.0, 0.0);
            }
            sign *= merge_sign(mask, bit);
            mask |= bit;
        }
        self.terms.get(&mask).copied().unwrap_or(Cx::new(0.0, 0.0)) * sign
    }

    /// Coefficient of a single generator in a 1-form context.
    pub fn coeff1(&self, index: usize, barred: bool) -> Cx {
        self.coeff(&[(index, barred)])
    }

    /// Homogeneous degree, or `None` for a mixed-degree form. The zero form
    /// reports `Some(0)`.
    pub fn degree(&self) -> Option<usize> {
        let mut deg = None;
        for &m in self.terms.keys() {
            let d = m.count_ones() as usize;
            match deg {
                None => deg = Some(d),
                Some(p) if p != d => return None,
                _ => {}
            }
        }
        Some(deg.unwrap_or(0))
    }

    /// Exterior product.
    pub fn wedge(&self, rhs: &Form) -> Form {
        assert_eq!(self.n, rhs.n, "wedge of forms over different frames");
        let mut out = Form::zero(self.n);
        for (&m1, &c1) in &self.terms {
            for (&m2, &c2) in &rhs.terms {
                if m1 & m2 != 0 {
                    continue;
                }
                out.add_term(m1 | m2, c1 * c2 * merge_sign(m1, m2));
            }
        }
        out
    }

    /// The `(p, q)` bidegree component.
    pub fn bidegree_part(&self, p: usize, q: usize) -> Form {
        let unbar = (1u32 << self.n) - 1;
        let mut out = Form::zero(self.n);
        for (&m, &c) in &self.terms {
            if (m & unbar).count_ones() as usize == p
                && (m >> self.n).count_ones() as usize == q
            {
                out.add_term(m, c);
            }
        }
        out
    }

    /// Complex conjugation: coefficients are conjugated and each generator is
    /// swapped with its bar. A `(p, q)` monomial picks up the reordering sign
    /// `(−1)^{pq}`.
    pub fn conjugate(&self) -> Form {
        let unbar = (1u32 << self.n) - 1;
        let mut out = Form::zero(self.n);
        for (&m, &c) in &self.terms {
            let p = (m & unbar).count_ones();
            let q = (m >> self.n).count_ones();
            let swapped = ((m & unbar) << self.n) | (m >> self.n);
            let sign = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
            out.add_term(swapped, c.conj() * sign);
        }
        out
    }

    /// Value of a degree-2 form on a pair of frame vectors.
    pub fn evaluate(&self, x: FrameVector, y: FrameVector) -> Result<Cx> {
        if x.index >= self.n {
            return Err(Error::IndexOutOfRange { index: x.index, n: self.n });
        }
        if y.index >= self.n {
            return Err(Error::IndexOutOfRange { index: y.index, n: self.n });
        }
        let bx = 1u32 << x.bit(self.n);
        let by = 1u32 << y.bit(self.n);
        let mut val = Cx::new(0.0, 0.0);
        for (&m, &c) in &self.terms {
            if m.count_ones() != 2 {
                return Err(Error::NotDegreeTwo);
            }
            if m != bx | by || bx == by {
                continue;
            }
            // m = {a, b} with a < b canonically; (φ_a∧φ_b)(e_a, e_b) = 1.
            let lo = 1u32 << m.trailing_zeros();
            val += if bx == lo { c } else { -c };
        }
        Ok(val)
    }

    /// Replace generator `g` (bit position order: `φ_0..φ_{n-1}, φ̄_0..φ̄_{n-1}`)
    /// by the 1-form `images[g]`, extended as an algebra map.
    pub fn substitute(&self, images: &[Form]) -> Result<Form> {
        if images.len() != 2 * self.n {
            return Err(Error::DimensionMismatch(images.len(), 2 * self.n));
        }
        let nn = images.first().map(|f| f.n).unwrap_or(self.n);
        let mut out = Form::zero(nn);
        for (&m, &c) in &self.terms {
            let mut acc = Form::scalar(nn, c);
            let mut rest = m;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                acc = acc.wedge(&images[b]);
                rest &= rest - 1;
            }
            out = &out + &acc;
        }
        Ok(out)
    }

    pub fn scaled(&self, c: Cx) -> Form {
        let mut out = Form::zero(self.n);
        for (&m, &v) in &self.terms {
            out.add_term(m, v * c);
        }
        out
    }

    /// Largest coefficient magnitude.
    pub fn norm_inf(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Hermitian inner product of coefficient vectors over the canonical
    /// monomial basis: `Σ_m c_m conj(c'_m)`.
    pub fn inner(&self, other: &Form) -> Cx {
        assert_eq!(self.n, other.n, "inner product of forms over different frames");
        let mut acc = Cx::new(0.0, 0.0);
        for (&m, &c) in &self.terms {
            if let Some(&d) = other.terms.get(&m) {
                acc += c * d.conj();
            }
        }
        acc
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm_inf() <= tol
    }

    pub fn approx_eq(&self, other: &Form, tol: f64) -> bool {
        (self - other).is_zero(tol)
    }
}

impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        assert_eq!(self.n, rhs.n, "sum of forms over different frames");
        let mut out = self.clone();
        for (&m, &c) in &rhs.terms {
            out.add_term(m, c);
        }
        out
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        assert_eq!(self.n, rhs.n, "difference of forms over different frames");
        let mut out = self.clone();
        for (&m, &c) in &rhs.terms {
            out.add_term(m, -c);
        }
        out
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scaled(Cx::new(-1.0, 0.0))
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&m, &c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)", c.re, c.im)?;
            let mut rest = m;
            let mut lead = true;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                let sep = if lead { "·" } else { "∧" };
                lead = false;
                if b < self.n {
                    write!(f, "{sep}φ{}", b + 1)?;
                } else {
                    write!(f, "{sep}φ̄{}", b - self.n + 1)?;
                }
                rest &= rest - 1;
            }
        }
        Ok(())
    }
}

/// A matrix of forms, used for connection and curvature matrices.
#[derive(Debug, Clone)]
pub struct FormMatrix {
    n: usize,
    rows: usize,
    cols: usize,
    data: Vec<Form>,
}

impl FormMatrix {
    pub fn zeros(n: usize, rows: usize, cols: usize) -> Self {
        FormMatrix { n, rows, cols, data: vec![Form::zero(n); rows * cols] }
    }

    pub fn from_fn(n: usize, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Form) -> Self {
        let mut m = FormMatrix::zeros(n, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                *m.get_mut(i, j) = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Form {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Form {
        &mut self.data[i * self.cols + j]
    }

    /// Entrywise exterior derivative is not defined here; this is the matrix
    /// wedge product `(A ∧ B)_{ij} = Σ_k A_{ik} ∧ B_{kj}`.
    pub fn wedge(&self, rhs: &FormMatrix) -> FormMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix wedge shape mismatch");
        FormMatrix::from_fn(self.n, self.rows, rhs.cols, |i, j| {
            let mut acc = Form::zero(self.n);
            for k in 0..self.cols {
                acc = &acc + &self.get(i, k).wedge(rhs.get(k, j));
            }
            acc
        })
    }

    pub fn map(&self, mut f: impl FnMut(&Form) -> Form) -> FormMatrix {
        FormMatrix {
            n: self.n,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| f(x)).collect(),
        }
    }

    pub fn transpose(&self) -> FormMatrix {
        FormMatrix::from_fn(self.n, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, rhs: &FormMatrix) -> FormMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        FormMatrix::from_fn(self.n, self.rows, self.cols, |i, j| self.get(i, j) + rhs.get(i, j))
    }

    pub fn sub(&self, rhs: &FormMatrix) -> FormMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        FormMatrix::from_fn(self.n, self.rows, self.cols, |i, j| self.get(i, j) - rhs.get(i, j))
    }

    pub fn scaled(&self, c: Cx) -> FormMatrix {
        self.map(|f| f.scaled(c))
    }

    pub fn norm_inf(&self) -> f64 {
        self.data.iter().map(|f| f.norm_inf()).fold(0.0, f64::max)
    }
}
