//! Builders for the worked examples: the compact-quotient Lie-Hermitian
//! structures (SO(3,ℂ), the nilmanifolds, the four middle-type families) and
//! the coordinate metrics (Euclidean, Fubini-Study, Hopf, Wallach).
//!
//! Family builders emit the displayed coframes verbatim; identifications such
//! as `A_{0,0} ≅ N³` are separate unitary changes and are not baked in.

use std::collections::BTreeMap;

use crate::expr::Expr;
use crate::form::Form;
use crate::metric::CoordinateMetric;
use crate::structure::LieHermitianStructure;
use crate::{Cx, Error, Result};

fn c(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

const I: Cx = Cx::new(0.0, 1.0);

/// Sum of wedge monomials `coeff · φ_a ∧ φ_b` (with bar flags) in dimension `n`.
fn two_form(n: usize, terms: &[(Cx, usize, bool, usize, bool)]) -> Result<Form> {
    let mut f = Form::zero(n);
    for &(coeff, a, abar, b, bbar) in terms {
        if coeff.norm() == 0.0 {
            continue;
        }
        f = &f + &Form::monomial(n, &[(a, abar), (b, bbar)], coeff)?;
    }
    Ok(f)
}

/// `dφ_1 = φ_2∧φ_3`, `dφ_2 = φ_3∧φ_1`, `dφ_3 = φ_1∧φ_2`: the bi-invariant
/// structure on SO(3,ℂ). Balanced, torsion-parallel, Chern-flat, `B = ½·1`.
pub fn so3c() -> LieHermitianStructure {
    let n = 3;
    let one = c(1.0, 0.0);
    let d = vec![
        two_form(n, &[(one, 1, false, 2, false)]).unwrap(),
        two_form(n, &[(one, 2, false, 0, false)]).unwrap(),
        two_form(n, &[(one, 0, false, 1, false)]).unwrap(),
    ];
    LieHermitianStructure::new(n, d).unwrap()
}

/// Complex nilmanifold with an abelian factor: `dφ_i = 0` for `i < r` and
/// `dφ_{r+α} = Σ_i Y_{αi} φ_i ∧ φ̄_i`.
pub fn nilmanifold(r: usize, y: &[Vec<Cx>]) -> Result<LieHermitianStructure> {
    let n = r + y.len();
    if n == 0 {
        return Err(Error::BadParameter("dimension must be positive".into()));
    }
    for row in y {
        if row.len() != r {
            return Err(Error::DimensionMismatch(row.len(), r));
        }
    }
    let mut d = vec![Form::zero(n); r];
    for row in y {
        let terms: Vec<_> = row
            .iter()
            .enumerate()
            .map(|(i, &coeff)| (coeff, i, false, i, true))
            .collect();
        d.push(two_form(n, &terms)?);
    }
    LieHermitianStructure::new(n, d)
}

/// The threefold nilmanifold `dφ_3 = φ_{1 1̄} + b φ_{2 2̄}`.
pub fn nilmanifold_b(b: Cx) -> LieHermitianStructure {
    nilmanifold(2, &[vec![c(1.0, 0.0), b]]).unwrap()
}

/// `N³`: `dφ_3 = φ_{1 1̄} − φ_{2 2̄}` (the `b = −1` member; balanced, middle type).
pub fn n3() -> LieHermitianStructure {
    nilmanifold_b(c(-1.0, 0.0))
}

/// Middle-type family `A_{a,b}` (`a, b` real):
/// `dφ_1 = a φ_1∧(φ_3 − φ̄_3)`, `dφ_2 = b φ_2∧(φ_3 − φ̄_3)`,
/// `dφ_3 = i(φ_{2 2̄} − φ_{1 1̄})`.
pub fn family_a(a: f64, b: f64) -> LieHermitianStructure {
    let n = 3;
    let ca = c(a, 0.0);
    let cb = c(b, 0.0);
    let d = vec![
        two_form(n, &[(ca, 0, false, 2, false), (-ca, 0, false, 2, true)]).unwrap(),
        two_form(n, &[(cb, 1, false, 2, false), (-cb, 1, false, 2, true)]).unwrap(),
        two_form(n, &[(I, 1, false, 1, true), (-I, 0, false, 0, true)]).unwrap(),
    ];
    LieHermitianStructure::new(n, d).unwrap()
}

fn sign_eps(epsilon: i8) -> Result<f64> {
    match epsilon {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        _ => Err(Error::BadParameter(format!("epsilon must be ±1, got {epsilon}"))),
    }
}

/// Middle-type family `B^ε_{u,v,w}`; the parameters must satisfy
/// `w − w̄ = εi(|u−v|² − |u+v|²)`.
pub fn family_b(epsilon: i8, u: Cx, v: Cx, w: Cx) -> Result<LieHermitianStructure> {
    let eps = sign_eps(epsilon)?;
    let want = I * eps * ((u - v).norm_sqr() - (u + v).norm_sqr());
    let got = w - w.conj();
    if (got - want).norm() > 1e-12 * (1.0 + w.norm() + u.norm_sqr() + v.norm_sqr()) {
        return Err(Error::ConstraintViolation(format!(
            "family B needs w − conj(w) = εi(|u−v|² − |u+v|²): got {got}, need {want}"
        )));
    }
    let n = 3;
    let r2 = 2.0_f64.sqrt();
    let ei = I * eps;
    let d = vec![
        two_form(
            n,
            &[
                (r2 * v, 0, false, 1, false),
                (-r2 * v.conj(), 0, false, 1, true),
                (w, 0, false, 2, false),
                (-w.conj(), 0, false, 2, true),
            ],
        )?,
        two_form(n, &[(-r2 * u.conj(), 1, false, 1, true)])?,
        two_form(n, &[(ei, 1, false, 1, true), (-ei, 0, false, 0, true)])?,
    ];
    LieHermitianStructure::new(n, d)
}

/// Middle-type family `C_{u,v}` (abelian complex structure):
/// `dφ_1 = u(φ_{1 1̄} + φ_{2 2̄}) + v(φ_{2 1̄} − φ_{1 2̄})`,
/// `dφ_2 = −v(φ_{1 1̄} + φ_{2 2̄}) + u(φ_{2 1̄} − φ_{1 2̄})`,
/// `dφ_3 = φ_{2 1̄} − φ_{1 2̄}`.
pub fn family_c(u: Cx, v: Cx) -> LieHermitianStructure {
    let n = 3;
    let one = c(1.0, 0.0);
    let d = vec![
        two_form(
            n,
            &[
                (u, 0, false, 0, true),
                (u, 1, false, 1, true),
                (v, 1, false, 0, true),
                (-v, 0, false, 1, true),
            ],
        )
        .unwrap(),
        two_form(
            n,
            &[
                (-v, 0, false, 0, true),
                (-v, 1, false, 1, true),
                (u, 1, false, 0, true),
                (-u, 0, false, 1, true),
            ],
        )
        .unwrap(),
        two_form(n, &[(one, 1, false, 0, true), (-one, 0, false, 1, true)]).unwrap(),
    ];
    LieHermitianStructure::new(n, d).unwrap()
}

/// Middle-type family `D^ε_{u,ρ}` with `|ρ| = 1`.
pub fn family_d(epsilon: i8, u: Cx, rho: Cx) -> Result<LieHermitianStructure> {
    let eps = sign_eps(epsilon)?;
    if (rho.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::ConstraintViolation(format!(
            "family D needs |ρ| = 1, got |ρ| = {}",
            rho.norm()
        )));
    }
    let n = 3;
    let one = c(1.0, 0.0);
    let ei = I * eps;
    let rb = rho.conj();
    let hol1 = u.conj() * (one + rho * ei);
    let d = vec![
        two_form(
            n,
            &[
                (hol1, 0, false, 1, false),
                (-u * rb, 0, false, 0, true),
                (u * ei, 1, false, 1, true),
                (-u, 1, false, 0, true),
                (u * rb * ei, 0, false, 1, true),
            ],
        )?,
        two_form(
            n,
            &[
                (hol1 * ei, 0, false, 1, false),
                (u, 0, false, 0, true),
                (u * rb * ei, 1, false, 1, true),
                (-u * rb, 1, false, 0, true),
                (-u * ei, 0, false, 1, true),
            ],
        )?,
        two_form(n, &[(one, 1, false, 0, true), (-one, 0, false, 1, true)])?,
    ];
    LieHermitianStructure::new(n, d)
}

/// Flat metric `g = 1`.
pub fn euclidean(n: usize) -> Result<CoordinateMetric> {
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(Expr::real(if i == j { 1.0 } else { 0.0 }));
        }
    }
    CoordinateMetric::new(n, entries, vec![c(0.0, 0.0); n])
}

fn norm2_expr(n: usize, offset: f64) -> Expr {
    let mut e = Expr::real(offset);
    for k in 0..n {
        e = Expr::add(e, Expr::mul(Expr::var(k), Expr::barred_var(k)));
    }
    e
}

/// Fubini-Study-type Kähler metric
/// `g_{i j̄} = ((1+|z|²) δ_{ij} − zb_i z_j)/(1+|z|²)²`, identity at the origin.
pub fn fubini_study(n: usize) -> Result<CoordinateMetric> {
    if n == 0 {
        return Err(Error::BadParameter("dimension must be positive".into()));
    }
    let norm2 = norm2_expr(n, 1.0);
    let denom = Expr::mul(norm2.clone(), norm2.clone());
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let cross = Expr::mul(Expr::barred_var(i), Expr::var(j));
            let num = if i == j {
                Expr::sub(norm2.clone(), cross)
            } else {
                Expr::Neg(Box::new(cross))
            };
            entries.push(Expr::div(num, denom.clone()));
        }
    }
    CoordinateMetric::new(n, entries, vec![c(0.0, 0.0); n])
}

/// Hopf metric `g_{i j̄} = δ_{ij}/|z|²` on ℂⁿ∖{0}, evaluated at `(1, 0, …, 0)`
/// where it is already the identity. The compact quotient is metadata only;
/// all checks here are point-local.
pub fn hopf(n: usize) -> Result<CoordinateMetric> {
    if n < 2 {
        return Err(Error::BadParameter("hopf requires dimension at least 2".into()));
    }
    let norm2 = norm2_expr(n, 0.0);
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(if i == j {
                Expr::div(Expr::real(1.0), norm2.clone())
            } else {
                Expr::real(0.0)
            });
        }
    }
    let mut point = vec![c(0.0, 0.0); n];
    point[0] = c(1.0, 0.0);
    CoordinateMetric::new(n, entries, point)
}

/// The Wallach flag-threefold metric `ω = ω̃ − σ` in the affine chart where
/// the base point is the origin:
///
/// ```text
/// α = 1 + |z_1|² + |z_2|²,   β = 1 + |z_3|² + |f|²,   f = z_2 + z_1 z_3,
/// g̃_{i j̄} = α_{i j̄}/α − α_i α_j̄/α² + β_{i j̄}/β − β_i β_j̄/β²,
/// σ = (z_3 dz_1 + dz_2)(z̄_3 dz̄_1 + dz̄_2)/(αβ).
/// ```
pub fn wallach() -> CoordinateMetric {
    let n = 3;
    let alpha = {
        let mut e = Expr::real(1.0);
        for k in 0..2 {
            e = Expr::add(e, Expr::mul(Expr::var(k), Expr::barred_var(k)));
        }
        e
    };
    let f = Expr::add(Expr::var(1), Expr::mul(Expr::var(0), Expr::var(2)));
    let beta = Expr::add(
        Expr::add(Expr::real(1.0), Expr::mul(Expr::var(2), Expr::barred_var(2))),
        Expr::mul(f.clone(), f.conj()),
    );
    let quotient_block = |phi: &Expr, i: usize, j: usize| -> Expr {
        let phi_i = phi.d(i, false);
        let phi_j = phi.d(j, true);
        let phi_ij = phi_i.d(j, true);
        Expr::sub(
            Expr::div(phi_ij, phi.clone()),
            Expr::div(Expr::mul(phi_i, phi_j), Expr::mul(phi.clone(), phi.clone())),
        )
    };
    let ab = Expr::mul(alpha.clone(), beta.clone());
    let sigma = |i: usize, j: usize| -> Expr {
        // (z_3 dz_1 + dz_2) ∧ conj: entries over the (1,2) block only.
        let num = match (i, j) {
            (0, 0) => Expr::mul(Expr::var(2), Expr::barred_var(2)),
            (0, 1) => Expr::var(2),
            (1, 0) => Expr::barred_var(2),
            (1, 1) => Expr::real(1.0),
            _ => return Expr::real(0.0),
        };
        Expr::div(num, ab.clone())
    };
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let tilde = Expr::add(quotient_block(&alpha, i, j), quotient_block(&beta, i, j));
            entries.push(Expr::sub(tilde, sigma(i, j)));
        }
    }
    CoordinateMetric::new(n, entries, vec![c(0.0, 0.0); n]).unwrap()
}

/// Built catalog output: either kind of geometric input.
#[derive(Debug, Clone)]
pub enum Built {
    Lie(LieHermitianStructure),
    Metric(CoordinateMetric),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogKind {
    Lie,
    Coordinate,
}

/// Parameter bundle for [`build`]: scalar parameters by name, plus an
/// optional matrix (the nilmanifold `Y`).
#[derive(Debug, Clone, Default)]
pub struct Params {
    pub scalars: BTreeMap<String, Cx>,
    pub matrix: Option<Vec<Vec<Cx>>>,
}

impl Params {
    pub fn new() -> Self {
        Params::default()
    }

    pub fn with(mut self, name: &str, value: Cx) -> Self {
        self.scalars.insert(name.to_string(), value);
        self
    }

    pub fn with_real(self, name: &str, value: f64) -> Self {
        self.with(name, c(value, 0.0))
    }

    fn cx(&self, entry: &str, name: &str) -> Result<Cx> {
        self.scalars.get(name).copied().ok_or_else(|| {
            Error::BadParameter(format!("{entry} requires parameter `{name}`"))
        })
    }

    fn real(&self, entry: &str, name: &str) -> Result<f64> {
        let v = self.cx(entry, name)?;
        if v.im != 0.0 {
            return Err(Error::BadParameter(format!(
                "{entry} parameter `{name}` must be real, got {v}"
            )));
        }
        Ok(v.re)
    }

    fn dimension(&self, entry: &str, name: &str) -> Result<usize> {
        let v = self.real(entry, name)?;
        if v < 1.0 || v.fract() != 0.0 {
            return Err(Error::BadParameter(format!(
                "{entry} parameter `{name}` must be a positive integer, got {v}"
            )));
        }
        Ok(v as usize)
    }

    fn sign(&self, entry: &str, name: &str) -> Result<i8> {
        let v = self.real(entry, name)?;
        if v == 1.0 {
            Ok(1)
        } else if v == -1.0 {
            Ok(-1)
        } else {
            Err(Error::BadParameter(format!(
                "{entry} parameter `{name}` must be ±1, got {v}"
            )))
        }
    }
}

/// Static manifest of one catalog entry.
#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: CatalogKind,
    /// Parameter names with a short note each.
    pub params: &'static [(&'static str, &'static str)],
    /// Properties the entry is expected to exhibit (checked in tests).
    pub expect: &'static str,
}

pub const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "so3c",
        kind: CatalogKind::Lie,
        params: &[],
        expect: "balanced, torsion-parallel, Chern-flat, rank B = 3",
    },
    CatalogEntry {
        name: "n3",
        kind: CatalogKind::Lie,
        params: &[],
        expect: "balanced, torsion-parallel, middle type (rank B = 2)",
    },
    CatalogEntry {
        name: "nilmanifold",
        kind: CatalogKind::Lie,
        params: &[
            ("r", "number of closed coframe elements"),
            ("Y", "matrix parameter: dφ_{r+α} = Σ_i Y_{αi} φ_{i ī}"),
        ],
        expect: "torsion-parallel for every Y",
    },
    CatalogEntry {
        name: "nilmanifold_b",
        kind: CatalogKind::Lie,
        params: &[("b", "dφ_3 = φ_{1 1̄} + b φ_{2 2̄}")],
        expect: "torsion-parallel; balanced iff b = −1; pluriclosed iff Re b = 0",
    },
    CatalogEntry {
        name: "family_A",
        kind: CatalogKind::Lie,
        params: &[("a", "real"), ("b", "real")],
        expect: "balanced, torsion-parallel, middle type, x = y = 0",
    },
    CatalogEntry {
        name: "family_B",
        kind: CatalogKind::Lie,
        params: &[
            ("epsilon", "±1"),
            ("u", "complex"),
            ("v", "complex"),
            ("w", "complex, w − conj(w) = εi(|u−v|² − |u+v|²)"),
        ],
        expect: "balanced, torsion-parallel, middle type",
    },
    CatalogEntry {
        name: "family_C",
        kind: CatalogKind::Lie,
        params: &[("u", "complex"), ("v", "complex")],
        expect: "balanced, torsion-parallel, middle type, x = −2|u|²−2|v|², y = 4 Im(u conj(v))",
    },
    CatalogEntry {
        name: "family_D",
        kind: CatalogKind::Lie,
        params: &[("epsilon", "±1"), ("u", "complex"), ("rho", "complex, |rho| = 1")],
        expect: "balanced, torsion-parallel, middle type",
    },
    CatalogEntry {
        name: "euclidean",
        kind: CatalogKind::Coordinate,
        params: &[("n", "dimension")],
        expect: "flat",
    },
    CatalogEntry {
        name: "fubini_study",
        kind: CatalogKind::Coordinate,
        params: &[("n", "dimension")],
        expect: "Kähler at the origin",
    },
    CatalogEntry {
        name: "hopf",
        kind: CatalogKind::Coordinate,
        params: &[("n", "dimension ≥ 2")],
        expect: "LCK torsion shape and parallel torsion at the point (Vaisman)",
    },
    CatalogEntry {
        name: "wallach",
        kind: CatalogKind::Coordinate,
        params: &[],
        expect: "balanced and torsion-parallel at the origin, rank B = 1, Ricci = 6",
    },
];

pub fn entry(name: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownCatalogEntry(name.to_string()))
}

pub fn build(name: &str, params: &Params) -> Result<Built> {
    match name {
        "so3c" => Ok(Built::Lie(so3c())),
        "n3" => Ok(Built::Lie(n3())),
        "nilmanifold" => {
            let r = params.dimension(name, "r")?;
            let y = params.matrix.as_ref().ok_or_else(|| {
                Error::BadParameter("nilmanifold requires matrix parameter `Y`".into())
            })?;
            Ok(Built::Lie(nilmanifold(r, y)?))
        }
        "nilmanifold_b" => Ok(Built::Lie(nilmanifold_b(params.cx(name, "b")?))),
        "family_A" => Ok(Built::Lie(family_a(
            params.real(name, "a")?,
            params.real(name, "b")?,
        ))),
        "family_B" => Ok(Built::Lie(family_b(
            params.sign(name, "epsilon")?,
            params.cx(name, "u")?,
            params.cx(name, "v")?,
            params.cx(name, "w")?,
        )?)),
        "family_C" => Ok(Built::Lie(family_c(
            params.cx(name, "u")?,
            params.cx(name, "v")?,
        ))),
        "family_D" => Ok(Built::Lie(family_d(
            params.sign(name, "epsilon")?,
            params.cx(name, "u")?,
            params.cx(name, "rho")?,
        )?)),
        "euclidean" => Ok(Built::Metric(euclidean(params.dimension(name, "n")?)?)),
        "fubini_study" => Ok(Built::Metric(fubini_study(params.dimension(name, "n")?)?)),
        "hopf" => Ok(Built::Metric(hopf(params.dimension(name, "n")?)?)),
        "wallach" => Ok(Built::Metric(wallach())),
        _ => Err(Error::UnknownCatalogEntry(name.to_string())),
    }
}

/// The standard grid of Lie-Hermitian examples used by the property suites:
/// every displayed structure plus small parameter samples of each family.
pub fn standard_lie_examples() -> Vec<(String, LieHermitianStructure)> {
    let mut out: Vec<(String, LieHermitianStructure)> = Vec::new();
    out.push(("abelian3".into(), LieHermitianStructure::abelian(3)));
    out.push(("so3c".into(), so3c()));
    out.push(("n3".into(), n3()));
    for (label, b) in [
        ("1", c(1.0, 0.0)),
        ("i", c(0.0, 1.0)),
        ("2i", c(0.0, 2.0)),
        ("1+i", c(1.0, 1.0)),
    ] {
        out.push((format!("nilmanifold_b={label}"), nilmanifold_b(b)));
    }
    for a in [-1.0, 0.0, 1.0] {
        for b in [-1.0, 0.0, 1.0] {
            out.push((format!("family_A a={a} b={b}"), family_a(a, b)));
        }
    }
    let b_samples = [
        (1_i8, c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
        (1, c(1.0, 0.0), c(1.0, 0.0), c(1.0, -2.0)),
        (-1, c(0.0, 1.0), c(1.0, 0.0), c(0.7, 0.0)),
    ];
    for (k, (eps, u, v, w)) in b_samples.into_iter().enumerate() {
        out.push((
            format!("family_B sample {k}"),
            family_b(eps, u, v, w).expect("sample satisfies the family constraint"),
        ));
    }
    let pts = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)];
    for (iu, &u) in pts.iter().enumerate() {
        for (iv, &v) in pts.iter().enumerate() {
            out.push((format!("family_C u#{iu} v#{iv}"), family_c(u, v)));
        }
    }
    let rho_samples = [
        ("1", c(1.0, 0.0)),
        ("i", c(0.0, 1.0)),
        ("(1+i)/sqrt2", c(1.0, 1.0) / 2.0_f64.sqrt()),
    ];
    for (lu, u) in [("1", c(1.0, 0.0)), ("i", c(0.0, 1.0))] {
        for (lr, rho) in rho_samples {
            for eps in [1_i8, -1] {
                out.push((
                    format!("family_D u={lu} rho={lr} eps={eps}"),
                    family_d(eps, u, rho).expect("|rho| = 1 by construction"),
                ));
            }
        }
    }
    out
}
