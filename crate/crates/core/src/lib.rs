//! Computational engine for Hermitian non-Kähler geometry.
//!
//! The crate works with two kinds of input:
//!
//! * **Left-invariant Hermitian structures** ([`LieHermitianStructure`]):
//!   a dimension `n` together with the constant coefficients of the exterior
//!   derivatives of a unitary coframe `φ_1, …, φ_n`. From these the crate
//!   computes the Chern, Bismut, and Levi-Civita connections, their torsion
//!   and curvature tensors, a family of derived tensors, and decides metric
//!   conditions (Kähler, balanced, Gauduchon, pluriclosed, Bismut-torsion-
//!   parallel, Bismut-Kähler-like, locally conformally Kähler, Vaisman, Lee
//!   potential, …) with residual diagnostics and threefold classification.
//!
//! * **Coordinate metrics at a point** ([`CoordinateMetric`]): a matrix of
//!   rational expressions `g_{i j̄}(z, z̄)` evaluated through degree-2 jets at
//!   a chosen base point, yielding torsion, Chern curvature, torsion-parallel
//!   residuals, and Levi-Civita sectional/Ricci data at that point.
//!
//! All floating point "is zero" decisions take an explicit tolerance; the
//! crate-wide default is [`DEFAULT_TOL`].

pub mod catalog;
pub mod classify;
pub mod conditions;
pub mod connection;
pub mod curvature;
pub mod expr;
pub mod form;
pub mod frames;
pub mod identities;
pub mod jet;
pub mod linalg;
pub mod metric;
pub mod par;
pub mod structure;
pub mod tensors;

use num_complex::Complex64;

/// Default zero-tolerance for all metric-condition predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Complex scalar used throughout.
pub type Cx = Complex64;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("frame dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operation requires a form of pure degree 2")]
    NotDegreeTwo,
    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),
    #[error("matrix is not normal (residual {0:.3e})")]
    NotNormal(f64),
    #[error("structure is balanced (|η| = {0:.3e}); admissible frames require η ≠ 0")]
    BalancedInput(f64),
    #[error("structure is not balanced (|η| = {0:.3e})")]
    NotBalanced(f64),
    #[error("structure is not Bismut-torsion-parallel (residual {0:.3e})")]
    NotTorsionParallel(f64),
    #[error("operation requires complex dimension 3, got {0}")]
    NotThreefold(usize),
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("division by an expression vanishing at the base point")]
    DivisionByZero,
    #[error("metric is singular at the evaluation point")]
    SingularMetric,
    #[error("metric is not positive definite at the evaluation point")]
    NotPositiveDefinite,
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),
    #[error("parameter constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use conditions::{check_all, ConditionReport};
pub use connection::ConnectionBundle;
pub use curvature::{Curvature4Tensor, CurvatureKind};
pub use form::{Form, FormMatrix, FrameVector};
pub use frames::{admissible_frame, special_frame, AdmissibleFrameResult, SpecialFrameResult};
pub use metric::{point_report, CoordinateMetric, PointReport};
pub use structure::LieHermitianStructure;
pub use tensors::{DerivedTensors, Torsion, TorsionDerivatives};
