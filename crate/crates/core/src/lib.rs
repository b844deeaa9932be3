//! Numerical kernel for analyzing smooth maps between Riemannian charts.
//!
//! The crate is organized bottom-up:
//!
//! * [`expr`] — scalar expression ASTs over named chart coordinates, with
//!   exact symbolic differentiation; every geometric quantity below is
//!   assembled from these.
//! * [`linalg`] — small dense matrices: Gauss–Jordan inversion, cyclic
//!   Jacobi eigendecomposition, metric-weighted Gram–Schmidt.
//! * [`geom`] — single-chart manifolds: metric and Christoffel evaluation,
//!   covariant derivatives, fixed-step RK4 geodesics.
//! * [`rmap`] — map scenarios: Jacobians, kernel/horizontal/range/perp frame
//!   splits, the second fundamental form, shape operators, mean curvature,
//!   tension fields.
//! * [`cstruct`] — almost complex structures on the target chart and the
//!   J² = −I / Hermitian / parallel-J residuals.
//! * [`slant`] — the tangential/normal decomposition of J on the range and
//!   slant-angle classification from the spectrum of −φ².
//! * [`clairaut`] — Clairaut certificates (umbilicity + gradient matching),
//!   affine potential fitting, and relation traces along geodesics.
//! * [`theorems`] — a named catalog of long tensor identities evaluated
//!   term-by-term as numerical residuals.
//! * [`ineq`] — adapted-frame sums, Casorati curvature, and inequality
//!   slack bookkeeping.
//! * [`fixtures`] — built-in scenarios used by the CLI and the test suites.
//!
//! `no_std` + `alloc`; all transcendentals go through `libm` so evaluation
//! is bit-identical across platforms.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod clairaut;
pub mod cstruct;
pub mod expr;
pub mod fixtures;
pub mod geom;
pub mod ineq;
pub mod linalg;
pub mod rmap;
pub mod slant;
pub mod theorems;

/// Numerical tolerances shared by frame construction and verdicts.
///
/// `rank` separates zero from nonzero vectors during orthonormalization,
/// `check` gates pass/fail verdicts, `cluster` merges eigenvalues of −φ²,
/// and `angle` bounds slant-angle drift across sample points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rank: f64,
    pub check: f64,
    pub cluster: f64,
    pub angle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: 1e-8,
            check: 1e-8,
            cluster: 1e-6,
            angle: 1e-6,
        }
    }
}
