//! Degree-2 truncated Taylor arithmetic ("2-jets") in the 2n offsets
//! `w_k = z_k − p_k` and `w̄_k`, treated as independent variables.
//!
//! A jet stores `f = c0 + Σ_u c1[u]·w_u + Σ_{u,v} q[u,v]·w_u·w_v` with `q`
//! symmetric and the quadratic sum running over all ordered pairs, so every
//! second partial is uniformly `∂²f/∂w_u∂w_v = 2q[u,v]`. Offsets `0..n` are
//! the unbarred directions, `n..2n` the barred ones.
//!
//! Division requires a nonzero constant term and truncates the geometric
//! series `1/(1+h) = 1 − h + h² − …` at degree 2.

use crate::expr::Expr;
use crate::{Cx, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    n: usize,
    c0: Cx,
    c1: Vec<Cx>,
    q: Vec<Cx>,
}

impl Jet {
    pub fn constant(n: usize, c: Cx) -> Jet {
        Jet { n, c0: c, c1: vec![Cx::new(0.0, 0.0); 2 * n], q: vec![Cx::new(0.0, 0.0); 4 * n * n] }
    }

    /// The jet of the coordinate function `z_k` (or `z̄_k`) around `p_k`.
    pub fn coordinate(n: usize, index: usize, barred: bool, value_at_point: Cx) -> Result<Jet> {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, n });
        }
        let mut j = Jet::constant(n, value_at_point);
        j.c1[index + if barred { n } else { 0 }] = Cx::new(1.0, 0.0);
        Ok(j)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Value at the base point.
    pub fn value(&self) -> Cx {
        self.c0
    }

    /// First partial `∂f/∂w_u`, `u` in `0..2n`.
    pub fn d1(&self, u: usize) -> Cx {
        self.c1[u]
    }

    /// Second partial `∂²f/∂w_u∂w_v`.
    pub fn d2(&self, u: usize, v: usize) -> Cx {
        2.0 * self.q[u * 2 * self.n + v]
    }

    pub fn conj(&self) -> Jet {
        let n = self.n;
        let swap = |u: usize| if u < n { u + n } else { u - n };
        let mut out = Jet::constant(n, self.c0.conj());
        for u in 0..2 * n {
            out.c1[u] = self.c1[swap(u)].conj();
        }
        for u in 0..2 * n {
            for v in 0..2 * n {
                out.q[u * 2 * n + v] = self.q[swap(u) * 2 * n + swap(v)].conj();
            }
        }
        out
    }

    pub fn add(&self, o: &Jet) -> Jet {
        assert_eq!(self.n, o.n);
        Jet {
            n: self.n,
            c0: self.c0 + o.c0,
            c1: self.c1.iter().zip(&o.c1).map(|(a, b)| a + b).collect(),
            q: self.q.iter().zip(&o.q).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        assert_eq!(self.n, o.n);
        Jet {
            n: self.n,
            c0: self.c0 - o.c0,
            c1: self.c1.iter().zip(&o.c1).map(|(a, b)| a - b).collect(),
            q: self.q.iter().zip(&o.q).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> Jet {
        Jet {
            n: self.n,
            c0: -self.c0,
            c1: self.c1.iter().map(|a| -a).collect(),
            q: self.q.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, c: Cx) -> Jet {
        Jet {
            n: self.n,
            c0: c * self.c0,
            c1: self.c1.iter().map(|a| c * a).collect(),
            q: self.q.iter().map(|a| c * a).collect(),
        }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        assert_eq!(self.n, o.n);
        let nn = 2 * self.n;
        let mut out = Jet::constant(self.n, self.c0 * o.c0);
        for u in 0..nn {
            out.c1[u] = self.c0 * o.c1[u] + o.c0 * self.c1[u];
        }
        for u in 0..nn {
            for v in 0..nn {
                out.q[u * nn + v] = self.c0 * o.q[u * nn + v]
                    + o.c0 * self.q[u * nn + v]
                    + 0.5 * (self.c1[u] * o.c1[v] + self.c1[v] * o.c1[u]);
            }
        }
        out
    }

    pub fn div(&self, o: &Jet) -> Result<Jet> {
        assert_eq!(self.n, o.n);
        if o.c0.norm() == 0.0 {
            return Err(Error::DivisionByZero);
        }
        // o = c0 (1 + h), h nilpotent to third order
        let h = o.scale(1.0 / o.c0).sub(&Jet::constant(self.n, Cx::new(1.0, 0.0)));
        let one = Jet::constant(self.n, Cx::new(1.0, 0.0));
        let inv = one.sub(&h).add(&h.mul(&h)).scale(1.0 / o.c0);
        Ok(self.mul(&inv))
    }
}

impl Jet {
    fn scale_real(&self, s: f64) -> Jet {
        self.scale(Cx::new(s, 0.0))
    }
}

impl std::ops::Div<Cx> for &Jet {
    type Output = Jet;
    fn div(self, rhs: Cx) -> Jet {
        self.scale(1.0 / rhs)
    }
}

impl std::ops::Div<f64> for &Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self.scale_real(1.0 / rhs)
    }
}

/// Evaluate an expression into a 2-jet around `point` (`w = z − point`).
pub fn expr_jet(e: &Expr, point: &[Cx]) -> Result<Jet> {
    let n = point.len();
    Ok(match e {
        Expr::Const(c) => Jet::constant(n, *c),
        Expr::Var { index, barred } => {
            let p = *point
                .get(*index)
                .ok_or(Error::IndexOutOfRange { index: *index, n })?;
            let base = if *barred { p.conj() } else { p };
            Jet::coordinate(n, *index, *barred, base)?
        }
        Expr::Neg(a) => expr_jet(a, point)?.neg(),
        Expr::Add(a, b) => expr_jet(a, point)?.add(&expr_jet(b, point)?),
        Expr::Sub(a, b) => expr_jet(a, point)?.sub(&expr_jet(b, point)?),
        Expr::Mul(a, b) => expr_jet(a, point)?.mul(&expr_jet(b, point)?),
        Expr::Div(a, b) => expr_jet(a, point)?.div(&expr_jet(b, point)?)?,
    })
}
