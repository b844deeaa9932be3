//! Map scenarios between two charts and the frame geometry of the map:
//! Jacobians, the four-way split kernel ⊕ horizontal of the source tangent
//! space and range ⊕ perp of the target tangent space, the linear-isometry
//! check, the second fundamental form
//!
//! ```text
//! (∇F_*)^a(X, Y) = ∂²F^a/∂xⁱ∂xʲ XⁱYʲ + Γ'^a_{bc}(F(p)) (dFX)^b (dFY)^c
//!                  − (dF)^a_k Γ^k_{ij} XⁱYʲ
//! ```
//!
//! shape operators through Weingarten duality, the induced connection on
//! the perp bundle, mean curvature, umbilicity, and the tension field.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cstruct::ComplexStructure;
use crate::expr::{EvalError, Expr};
use crate::geom::{GeomError, ManifoldChart};
use crate::linalg::{self, LinalgError, Mat};
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub enum MapError {
    Geom(GeomError),
    Eval(EvalError),
    Linalg(LinalgError),
    Dimension(String),
    /// Jacobian rank differs across sample points.
    NonConstantRank { ranks: Vec<usize> },
    /// A frame split disagreed with the scenario's established rank.
    RankMismatch { expected: usize, got: usize },
    /// A field expected to lie in (range F_*)^⊥ has a range component.
    NotPerp { residual: f64 },
    NoSamplePoints,
}

impl fmt::Display for MapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapError::Geom(e) => write!(f, "{e}"),
            MapError::Eval(e) => write!(f, "{e}"),
            MapError::Linalg(e) => write!(f, "{e}"),
            MapError::Dimension(msg) => write!(f, "dimension error: {msg}"),
            MapError::NonConstantRank { ranks } => {
                write!(f, "Jacobian rank varies across sample points: {ranks:?}")
            }
            MapError::RankMismatch { expected, got } => {
                write!(f, "rank {got} does not match the scenario rank {expected}")
            }
            MapError::NotPerp { residual } => {
                write!(f, "field is not normal to the range (residual {residual:e})")
            }
            MapError::NoSamplePoints => write!(f, "scenario declares no sample points"),
        }
    }
}

impl From<GeomError> for MapError {
    fn from(e: GeomError) -> Self {
        MapError::Geom(e)
    }
}

impl From<EvalError> for MapError {
    fn from(e: EvalError) -> Self {
        MapError::Eval(e)
    }
}

impl From<LinalgError> for MapError {
    fn from(e: LinalgError) -> Self {
        MapError::Linalg(e)
    }
}

/// A smooth map between two charts plus the data needed to check it:
/// sample points, an optional complex structure on the target, and an
/// optional Clairaut potential. Component first and second partials are
/// differentiated symbolically once at construction.
#[derive(Debug, Clone)]
pub struct MapScenario {
    pub source: ManifoldChart,
    pub target: ManifoldChart,
    pub components: Vec<Expr>,
    pub complex_structure: Option<ComplexStructure>,
    pub potential: Option<Expr>,
    pub sample_points: Vec<Vec<f64>>,
    pub tol: Tolerances,
    rank: usize,
    /// d1[a][i] = ∂F^a/∂xⁱ
    d1: Vec<Vec<Expr>>,
    /// d2[a][i][j] = ∂²F^a/∂xⁱ∂xʲ
    d2: Vec<Vec<Vec<Expr>>>,
}

impl MapScenario {
    pub fn new(
        source: ManifoldChart,
        target: ManifoldChart,
        components: Vec<Expr>,
        complex_structure: Option<ComplexStructure>,
        potential: Option<Expr>,
        sample_points: Vec<Vec<f64>>,
        tol: Tolerances,
    ) -> Result<MapScenario, MapError> {
        let m = source.dim();
        let n = target.dim();
        if components.len() != n {
            return Err(MapError::Dimension(format!(
                "expected {n} map components, got {}",
                components.len()
            )));
        }
        if let Some(j) = &complex_structure {
            if j.dim() != n {
                return Err(MapError::Dimension(format!(
                    "complex structure is {}×{} but the target dimension is {n}",
                    j.dim(),
                    j.dim()
                )));
            }
        }
        if sample_points.is_empty() {
            return Err(MapError::NoSamplePoints);
        }
        if let Some(p) = sample_points.iter().find(|p| p.len() != m) {
            return Err(MapError::Dimension(format!(
                "sample point has {} coordinates, expected {m}",
                p.len()
            )));
        }
        let d1: Vec<Vec<Expr>> = components
            .iter()
            .map(|c| (0..m).map(|i| c.derivative(i)).collect())
            .collect();
        let d2: Vec<Vec<Vec<Expr>>> = d1
            .iter()
            .map(|row| {
                row.iter()
                    .map(|di| (0..m).map(|j| di.derivative(j)).collect())
                    .collect()
            })
            .collect();
        let mut scn = MapScenario {
            source,
            target,
            components,
            complex_structure,
            potential,
            sample_points,
            tol,
            rank: 0,
            d1,
            d2,
        };
        // constant-rank enforcement across the declared sample points
        let mut ranks = Vec::new();
        for p in scn.sample_points.clone() {
            let split = scn.split_unchecked(&p)?;
            ranks.push(split.rank());
        }
        if ranks.windows(2).any(|w| w[0] != w[1]) {
            return Err(MapError::NonConstantRank { ranks });
        }
        scn.rank = ranks[0];
        if scn.rank == 0 {
            return Err(MapError::NonConstantRank { ranks });
        }
        Ok(scn)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn source_dim(&self) -> usize {
        self.source.dim()
    }

    pub fn target_dim(&self) -> usize {
        self.target.dim()
    }

    /// F(p).
    pub fn map_at(&self, p: &[f64]) -> Result<Vec<f64>, MapError> {
        self.components
            .iter()
            .map(|c| c.eval(p).map_err(MapError::from))
            .collect()
    }

    /// Entry (a, i) is ∂F^a/∂xⁱ at `p`.
    pub fn jacobian_at(&self, p: &[f64]) -> Result<Mat, MapError> {
        let (m, n) = (self.source_dim(), self.target_dim());
        let mut jac = Mat::zeros(n, m);
        for a in 0..n {
            for i in 0..m {
                jac[(a, i)] = self.d1[a][i].eval(p)?;
            }
        }
        Ok(jac)
    }

    /// dF(v) at `p`.
    pub fn push(&self, p: &[f64], v: &[f64]) -> Result<Vec<f64>, MapError> {
        Ok(self.jacobian_at(p)?.matvec(v))
    }

    fn split_unchecked(&self, p: &[f64]) -> Result<FrameSplit, MapError> {
        let m = self.source_dim();
        let n = self.target_dim();
        let jac = self.jacobian_at(p)?;
        let image = self.map_at(p)?;
        let g_source = self.source.metric_at(p)?;
        let g_target = self.target.metric_at(&image)?;
        let rank_tol = self.tol.rank;

        // kernel: run a g_N Gram–Schmidt over the pushed coordinate basis,
        // carrying the matching source combination; a combination whose
        // image collapses is a kernel vector.
        let mut img_basis: Vec<Vec<f64>> = Vec::new();
        let mut src_partners: Vec<Vec<f64>> = Vec::new();
        let mut kernel_raw: Vec<Vec<f64>> = Vec::new();
        for i in 0..m {
            let mut v = vec![0.0; m];
            v[i] = 1.0;
            let mut w = jac.col(i);
            for _ in 0..2 {
                for (b, s) in img_basis.iter().zip(&src_partners) {
                    let c = linalg::g_inner(&g_target, &w, b);
                    w = linalg::add_scaled(&w, b, -c);
                    v = linalg::add_scaled(&v, s, -c);
                }
            }
            let norm = linalg::g_norm(&g_target, &w);
            if norm < rank_tol {
                kernel_raw.push(v);
            } else {
                img_basis.push(linalg::scale(&w, 1.0 / norm));
                src_partners.push(linalg::scale(&v, 1.0 / norm));
            }
        }
        let kernel = linalg::gram_schmidt(&g_source, &kernel_raw, rank_tol).basis;

        // horizontal: the g_M-orthonormal complement of the kernel
        let mut seed = kernel.clone();
        for i in 0..m {
            let mut v = vec![0.0; m];
            v[i] = 1.0;
            seed.push(v);
        }
        let completed = linalg::gram_schmidt(&g_source, &seed, rank_tol).basis;
        let horizontal: Vec<Vec<f64>> = completed[kernel.len()..].to_vec();

        // range: horizontal pushed through dF, re-orthonormalized in g_N
        let pushed: Vec<Vec<f64>> = horizontal.iter().map(|h| jac.matvec(h)).collect();
        let range = linalg::gram_schmidt(&g_target, &pushed, rank_tol).basis;

        // perp: the g_N-orthonormal complement of the range
        let mut seed = range.clone();
        for a in 0..n {
            let mut w = vec![0.0; n];
            w[a] = 1.0;
            seed.push(w);
        }
        let completed = linalg::gram_schmidt(&g_target, &seed, rank_tol).basis;
        let range_perp: Vec<Vec<f64>> = completed[range.len()..].to_vec();

        Ok(FrameSplit {
            point: p.to_vec(),
            image,
            jacobian: jac,
            g_source,
            g_target,
            kernel,
            horizontal,
            range,
            range_perp,
        })
    }

    /// The four-way frame split at `p`; rejects a rank that disagrees with
    /// the scenario's constant rank.
    pub fn frame_split(&self, p: &[f64]) -> Result<FrameSplit, MapError> {
        let split = self.split_unchecked(p)?;
        if split.rank() != self.rank {
            return Err(MapError::RankMismatch {
                expected: self.rank,
                got: split.rank(),
            });
        }
        Ok(split)
    }

    /// Linear-isometry check on the horizontal frame:
    /// max |g_N(F_*hᵢ, F_*hⱼ) − g_M(hᵢ, hⱼ)|.
    pub fn is_riemannian_map(&self, split: &FrameSplit) -> RiemannianVerdict {
        let mut worst = 0.0f64;
        for hi in split.horizontal.iter() {
            let wi = split.jacobian.matvec(hi);
            for hj in split.horizontal.iter() {
                let wj = split.jacobian.matvec(hj);
                let target = linalg::g_inner(&split.g_target, &wi, &wj);
                let source = linalg::g_inner(&split.g_source, hi, hj);
                worst = worst.max((target - source).abs());
            }
        }
        RiemannianVerdict {
            verdict: worst < self.tol.check,
            max_residual: worst,
        }
    }

    /// (∇F_*)(X, Y) at `p` as a target coordinate vector.
    pub fn second_fundamental_form(
        &self,
        split: &FrameSplit,
        x: &[f64],
        y: &[f64],
    ) -> Result<Vec<f64>, MapError> {
        let m = self.source_dim();
        let n = self.target_dim();
        let p = &split.point;
        let gamma_src = self.source.christoffel_at(p)?;
        let gamma_tgt = self.target.christoffel_at(&split.image)?;
        let fx = split.jacobian.matvec(x);
        let fy = split.jacobian.matvec(y);

        let mut out = vec![0.0; n];
        for a in 0..n {
            let mut acc = 0.0;
            for i in 0..m {
                if x[i] == 0.0 {
                    continue;
                }
                for j in 0..m {
                    if y[j] == 0.0 {
                        continue;
                    }
                    acc += self.d2[a][i][j].eval(p)? * x[i] * y[j];
                }
            }
            for b in 0..n {
                if fx[b] == 0.0 {
                    continue;
                }
                for c in 0..n {
                    acc += gamma_tgt[a][(b, c)] * fx[b] * fy[c];
                }
            }
            out[a] = acc;
        }
        // − dF(Γ_src(X, Y))
        let mut gxy = vec![0.0; m];
        for k in 0..m {
            let mut s = 0.0;
            for i in 0..m {
                if x[i] == 0.0 {
                    continue;
                }
                for j in 0..m {
                    s += gamma_src[k][(i, j)] * x[i] * y[j];
                }
            }
            gxy[k] = s;
        }
        let pushed = split.jacobian.matvec(&gxy);
        for a in 0..n {
            out[a] -= pushed[a];
        }
        Ok(out)
    }

    /// Weingarten dual of the second fundamental form: the unique range
    /// vector with g_N(S_V F_*X, F_*Y) = g_N((∇F_*)(X, Y), V) for all
    /// horizontal Y.
    pub fn shape_operator(
        &self,
        split: &FrameSplit,
        v: &[f64],
        fx: &[f64],
    ) -> Result<Vec<f64>, MapError> {
        let x = split.pullback(fx)?;
        let mut out = vec![0.0; self.target_dim()];
        for r in &split.range {
            let y = split.pullback(r)?;
            let sff = self.second_fundamental_form(split, &x, &y)?;
            let coeff = linalg::g_inner(&split.g_target, &sff, v);
            out = linalg::add_scaled(&out, r, coeff);
        }
        Ok(out)
    }

    /// Perp projection of ∇^N_{F_*X} V for a target vector field given as
    /// expressions; `vfield(F(p))` must already lie in the perp space.
    pub fn normal_connection(
        &self,
        split: &FrameSplit,
        x: &[f64],
        vfield: &[Expr],
    ) -> Result<Vec<f64>, MapError> {
        let n = self.target_dim();
        if vfield.len() != n {
            return Err(MapError::Dimension(
                "perp field must have one component per target coordinate".into(),
            ));
        }
        let q = &split.image;
        let value: Vec<f64> = vfield
            .iter()
            .map(|e| e.eval(q))
            .collect::<Result<_, _>>()?;
        let range_part = split.range_project(&value);
        let residual = linalg::g_norm(&split.g_target, &range_part);
        if residual > self.tol.check {
            return Err(MapError::NotPerp { residual });
        }
        let fx = split.jacobian.matvec(x);
        let full = self.target.covariant_derivative_at(q, vfield, &fx)?;
        Ok(split.perp_project(&full))
    }

    /// Mean curvature H = (1/r) Σᵢ (∇F_*)(hᵢ, hᵢ) over the horizontal
    /// orthonormal frame.
    pub fn mean_curvature(&self, split: &FrameSplit) -> Result<Vec<f64>, MapError> {
        let mut h = vec![0.0; self.target_dim()];
        for hi in &split.horizontal {
            let sff = self.second_fundamental_form(split, hi, hi)?;
            h = linalg::add_scaled(&h, &sff, 1.0);
        }
        let r = split.rank() as f64;
        Ok(linalg::scale(&h, 1.0 / r))
    }

    /// Umbilicity: max over frame pairs of ‖(∇F_*)(hᵢ, hⱼ) − δᵢⱼ H‖.
    pub fn is_umbilical(&self, split: &FrameSplit) -> Result<UmbilicalVerdict, MapError> {
        let h = self.mean_curvature(split)?;
        let mut worst = 0.0f64;
        for (i, hi) in split.horizontal.iter().enumerate() {
            for (j, hj) in split.horizontal.iter().enumerate() {
                let sff = self.second_fundamental_form(split, hi, hj)?;
                let expect = if i == j { 1.0 } else { 0.0 };
                let diff = linalg::add_scaled(&sff, &h, -expect);
                worst = worst.max(linalg::g_norm(&split.g_target, &diff));
            }
        }
        Ok(UmbilicalVerdict {
            verdict: worst < self.tol.check,
            residual: worst,
            mean_curvature: h,
        })
    }

    /// Tension field τ(F) = Σ (∇F_*)(E, E) over the full source
    /// orthonormal frame (kernel and horizontal together).
    pub fn tension_field(&self, split: &FrameSplit) -> Result<Vec<f64>, MapError> {
        let mut tau = vec![0.0; self.target_dim()];
        for e in split.kernel.iter().chain(&split.horizontal) {
            let sff = self.second_fundamental_form(split, e, e)?;
            tau = linalg::add_scaled(&tau, &sff, 1.0);
        }
        Ok(tau)
    }

    /// Components B^α_{ij} = g_N((∇F_*)(hᵢ, hⱼ), V_α); one symmetric r×r
    /// matrix per perp frame vector.
    pub fn sff_component_matrix(&self, split: &FrameSplit) -> Result<Vec<Mat>, MapError> {
        let r = split.rank();
        let mut out = Vec::with_capacity(split.range_perp.len());
        for v in &split.range_perp {
            let mut b = Mat::zeros(r, r);
            for i in 0..r {
                for j in i..r {
                    let sff = self.second_fundamental_form(
                        split,
                        &split.horizontal[i],
                        &split.horizontal[j],
                    )?;
                    let c = linalg::g_inner(&split.g_target, &sff, v);
                    b[(i, j)] = c;
                    b[(j, i)] = c;
                }
            }
            out.push(b);
        }
        Ok(out)
    }

    /// Max range-projection norm of ∇^N_U W over perp frame pairs, with
    /// the frame vectors extended as coordinate-constant fields. Zero means
    /// the perp distribution is totally geodesic at this point.
    pub fn perp_totally_geodesic_residual(&self, split: &FrameSplit) -> Result<f64, MapError> {
        let gamma = self.target.christoffel_at(&split.image)?;
        let n = self.target_dim();
        let mut worst = 0.0f64;
        for u in &split.range_perp {
            for w in &split.range_perp {
                let mut nabla = vec![0.0; n];
                for a in 0..n {
                    let mut s = 0.0;
                    for b in 0..n {
                        for c in 0..n {
                            s += gamma[a][(b, c)] * u[b] * w[c];
                        }
                    }
                    nabla[a] = s;
                }
                let range_part = split.range_project(&nabla);
                worst = worst.max(linalg::g_norm(&split.g_target, &range_part));
            }
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiemannianVerdict {
    pub verdict: bool,
    pub max_residual: f64,
}

#[derive(Debug, Clone)]
pub struct UmbilicalVerdict {
    pub verdict: bool,
    pub residual: f64,
    pub mean_curvature: Vec<f64>,
}

/// Orthonormal frames for kernel ⊕ horizontal at `p` and range ⊕ perp at
/// F(p), plus the evaluated Jacobian and metrics they were built from.
#[derive(Debug, Clone)]
pub struct FrameSplit {
    pub point: Vec<f64>,
    pub image: Vec<f64>,
    pub jacobian: Mat,
    pub g_source: Mat,
    pub g_target: Mat,
    pub kernel: Vec<Vec<f64>>,
    pub horizontal: Vec<Vec<f64>>,
    pub range: Vec<Vec<f64>>,
    pub range_perp: Vec<Vec<f64>>,
}

impl FrameSplit {
    pub fn rank(&self) -> usize {
        self.range.len()
    }

    /// Projection of a target vector onto span(range).
    pub fn range_project(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; w.len()];
        for r in &self.range {
            let c = linalg::g_inner(&self.g_target, w, r);
            out = linalg::add_scaled(&out, r, c);
        }
        out
    }

    /// Projection of a target vector onto span(range_perp).
    pub fn perp_project(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; w.len()];
        for v in &self.range_perp {
            let c = linalg::g_inner(&self.g_target, w, v);
            out = linalg::add_scaled(&out, v, c);
        }
        out
    }

    /// Projection of a source vector onto span(kernel).
    pub fn kernel_project(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        for k in &self.kernel {
            let c = linalg::g_inner(&self.g_source, u, k);
            out = linalg::add_scaled(&out, k, c);
        }
        out
    }

    /// The horizontal lift `*F_*`: solves dF(x) = w for the unique
    /// horizontal x, given w in the range span.
    pub fn pullback(&self, w: &[f64]) -> Result<Vec<f64>, MapError> {
        let r = self.rank();
        let mut a = Mat::zeros(r, r);
        let mut rhs = vec![0.0; r];
        for (i, ri) in self.range.iter().enumerate() {
            for (j, hj) in self.horizontal.iter().enumerate() {
                let pushed = self.jacobian.matvec(hj);
                a[(i, j)] = linalg::g_inner(&self.g_target, &pushed, ri);
            }
            rhs[i] = linalg::g_inner(&self.g_target, w, ri);
        }
        let xi = a.solve(&rhs)?;
        let mut out = vec![0.0; self.point.len()];
        for (j, hj) in self.horizontal.iter().enumerate() {
            out = linalg::add_scaled(&out, hj, xi[j]);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use alloc::vec;
    use rand::Rng;
    use rand::SeedableRng;

    fn random_point(rng: &mut impl Rng, hemi: bool) -> Vec<f64> {
        (0..6)
            .map(|i| {
                if hemi && i == 3 {
                    0.0
                } else {
                    rng.gen_range(-1.0..1.0)
                }
            })
            .collect()
    }

    #[test]
    fn identity_map_jacobian_is_identity() {
        let scn = fixtures::euclidean_identity();
        let jac = scn.jacobian_at(&[0.2, -0.3, 0.5, 0.9]).unwrap();
        assert_eq!(jac, Mat::identity(4));
    }

    #[test]
    fn semi_fixture_pushforward_mixes_first_and_last_axes() {
        let scn = fixtures::paper_semi_slant();
        let p = [0.3, -0.7, 0.4, 1.1, -0.2, 0.5];
        let image = scn.push(&p, &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let alpha = fixtures::SLANT_ANGLE;
        assert!((image[0] - libm::sin(alpha)).abs() < 1e-15);
        assert!((image[5] - libm::cos(alpha)).abs() < 1e-15);
        for a in [1, 2, 3, 4] {
            assert!(image[a].abs() < 1e-15);
        }
    }

    #[test]
    fn hemi_fixture_kills_fourth_coordinate() {
        let scn = fixtures::paper_hemi_slant();
        let p = [0.3, -0.7, 0.4, 0.0, -0.2, 0.5];
        let image = scn.push(&p, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(image.iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn frame_split_dimensions_match_fixture_structure() {
        let semi = fixtures::paper_semi_slant();
        let split = semi.frame_split(&semi.sample_points[0]).unwrap();
        assert_eq!(split.kernel.len(), 2);
        assert_eq!(split.horizontal.len(), 4);
        assert_eq!(split.range.len(), 4);
        assert_eq!(split.range_perp.len(), 2);

        let hemi = fixtures::paper_hemi_slant();
        let split = hemi.frame_split(&hemi.sample_points[0]).unwrap();
        assert_eq!(split.kernel.len(), 3);
        assert_eq!(split.range.len(), 3);
        assert_eq!(split.range_perp.len(), 3);

        let id = fixtures::euclidean_identity();
        let split = id.frame_split(&id.sample_points[0]).unwrap();
        assert!(split.kernel.is_empty());
        assert_eq!(split.range.len(), 4);
        assert!(split.range_perp.is_empty());
    }

    #[test]
    fn frame_split_invariants_hold_on_fixtures() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for (scn, hemi) in [
            (fixtures::paper_semi_slant(), false),
            (fixtures::paper_hemi_slant(), true),
        ] {
            for _ in 0..5 {
                let p = random_point(&mut rng, hemi);
                let split = scn.frame_split(&p).unwrap();
                // kernel maps to zero
                for k in &split.kernel {
                    let img = split.jacobian.matvec(k);
                    assert!(linalg::g_norm(&split.g_target, &img) < scn.tol.rank);
                }
                // orthonormality within each family
                for (fam, g) in [
                    (&split.kernel, &split.g_source),
                    (&split.horizontal, &split.g_source),
                    (&split.range, &split.g_target),
                    (&split.range_perp, &split.g_target),
                ] {
                    for (i, u) in fam.iter().enumerate() {
                        for (j, v) in fam.iter().enumerate() {
                            let expect = if i == j { 1.0 } else { 0.0 };
                            assert!(
                                (linalg::g_inner(g, u, v) - expect).abs() < 1e-9,
                                "family not orthonormal"
                            );
                        }
                    }
                }
                // kernel ⊥ horizontal
                for k in &split.kernel {
                    for h in &split.horizontal {
                        assert!(linalg::g_inner(&split.g_source, k, h).abs() < 1e-9);
                    }
                }
                // resolution of identity on random target vectors
                for _ in 0..4 {
                    let w: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let back = linalg::add_scaled(
                        &split.range_project(&w),
                        &split.perp_project(&w),
                        1.0,
                    );
                    for (a, b) in w.iter().zip(&back) {
                        assert!((a - b).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn paper_fixtures_are_riemannian_maps_at_random_points() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for (scn, hemi) in [
            (fixtures::paper_semi_slant(), false),
            (fixtures::paper_hemi_slant(), true),
        ] {
            for _ in 0..20 {
                let p = random_point(&mut rng, hemi);
                let split = scn.frame_split(&p).unwrap();
                let check = scn.is_riemannian_map(&split);
                assert!(check.verdict, "residual {}", check.max_residual);
                assert!(check.max_residual < 1e-9);
            }
        }
    }

    #[test]
    fn scaling_map_is_not_riemannian() {
        let scn = fixtures::line_scaling(2.0);
        let split = scn.frame_split(&scn.sample_points[0]).unwrap();
        let check = scn.is_riemannian_map(&split);
        assert!(!check.verdict);
        assert!((check.max_residual - 3.0).abs() < 1e-12);
    }

    #[test]
    fn non_constant_rank_scenario_is_rejected() {
        let err = fixtures::parabola_fold().unwrap_err();
        assert!(matches!(err, MapError::NonConstantRank { .. }));
    }

    #[test]
    fn identity_map_has_vanishing_sff() {
        let scn = fixtures::euclidean_identity();
        let split = scn.frame_split(&scn.sample_points[0]).unwrap();
        let sff = scn
            .second_fundamental_form(&split, &[1.0, 2.0, -0.5, 0.3], &[0.7, -1.0, 0.0, 2.0])
            .unwrap();
        assert!(sff.iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn semi_fixture_sff_vanishes_in_flat_direction() {
        // both connection terms vanish separately for X = Y = ∂x₂
        let scn = fixtures::paper_semi_slant();
        let p = [0.3, -0.7, 0.4, 1.1, -0.2, 0.5];
        let split = scn.frame_split(&p).unwrap();
        let e2 = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        let sff = scn.second_fundamental_form(&split, &e2, &e2).unwrap();
        assert!(sff.iter().all(|c| c.abs() < 1e-12), "{sff:?}");

        // term-by-term oracle: target Christoffel contraction and pushed
        // source contraction are each zero here
        let gamma_tgt = scn.target.christoffel_at(&split.image).unwrap();
        let fx = split.jacobian.matvec(&e2);
        for a in 0..6 {
            let mut term = 0.0;
            for b in 0..6 {
                for c in 0..6 {
                    term += gamma_tgt[a][(b, c)] * fx[b] * fx[c];
                }
            }
            assert!(term.abs() < 1e-12);
        }
        let gamma_src = scn.source.christoffel_at(&p).unwrap();
        for k in 0..6 {
            assert!(gamma_src[k][(1, 1)].abs() < 1e-12);
        }
    }

    #[test]
    fn semi_fixture_is_totally_geodesic_on_horizontal_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let scn = fixtures::paper_semi_slant();
        for _ in 0..5 {
            let p = random_point(&mut rng, false);
            let split = scn.frame_split(&p).unwrap();
            for hi in &split.horizontal {
                for hj in &split.horizontal {
                    let sff = scn.second_fundamental_form(&split, hi, hj).unwrap();
                    let norm = linalg::g_norm(&split.g_target, &sff);
                    assert!(norm < 1e-10, "‖SFF‖ = {norm}");
                }
            }
        }
    }

    #[test]
    fn hemi_fixture_sff_matches_hand_computed_value() {
        // (∇F_*)(∂x₃, ∂x₃) = Γ'⁴₃₃ ∂y₄ − dF(Γ⁴₃₃ ∂x₄) = −∂y₄ − 0
        let scn = fixtures::paper_hemi_slant();
        let p = [0.3, -0.7, 0.4, 0.0, -0.2, 0.5];
        let split = scn.frame_split(&p).unwrap();
        let e3 = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        let sff = scn.second_fundamental_form(&split, &e3, &e3).unwrap();
        let expect = [0.0, 0.0, 0.0, -1.0, 0.0, 0.0];
        for (got, want) in sff.iter().zip(&expect) {
            assert!((got - want).abs() < 1e-12, "{sff:?}");
        }
    }

    #[test]
    fn sff_is_bilinear_and_symmetric() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        let scn = fixtures::paper_hemi_slant();
        for _ in 0..10 {
            let p = random_point(&mut rng, true);
            let split = scn.frame_split(&p).unwrap();
            let x: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sxy = scn.second_fundamental_form(&split, &x, &y).unwrap();
            let syx = scn.second_fundamental_form(&split, &y, &x).unwrap();
            let x2 = linalg::scale(&x, 2.0);
            let s2xy = scn.second_fundamental_form(&split, &x2, &y).unwrap();
            for a in 0..6 {
                assert!((sxy[a] - syx[a]).abs() < 1e-10);
                assert!((s2xy[a] - 2.0 * sxy[a]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn sff_of_riemannian_map_is_perp_valued() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for (scn, hemi) in [
            (fixtures::paper_hemi_slant(), true),
            (fixtures::horosphere(), false),
        ] {
            for _ in 0..5 {
                let p = if hemi {
                    random_point(&mut rng, true)
                } else {
                    vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
                };
                let split = scn.frame_split(&p).unwrap();
                for hi in &split.horizontal {
                    for hj in &split.horizontal {
                        let sff = scn.second_fundamental_form(&split, hi, hj).unwrap();
                        let range_part = split.range_project(&sff);
                        assert!(linalg::g_norm(&split.g_target, &range_part) < 1e-7);
                    }
                }
            }
        }
    }

    #[test]
    fn shape_operator_vanishes_for_totally_geodesic_maps() {
        let scn = fixtures::paper_semi_slant();
        let split = scn.frame_split(&scn.sample_points[0]).unwrap();
        let v = split.range_perp[0].clone();
        let fx = split.range[0].clone();
        let s = scn.shape_operator(&split, &v, &fx).unwrap();
        assert!(linalg::g_norm(&split.g_target, &s) < 1e-10);
    }

    #[test]
    fn weingarten_duality_holds_on_curved_fixtures() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        for scn in [fixtures::paper_hemi_slant(), fixtures::horosphere()] {
            let p = scn.sample_points[1].clone();
            let split = scn.frame_split(&p).unwrap();
            for _ in 0..20 {
                // random perp vector and range vector
                let mut v = vec![0.0; scn.target_dim()];
                for b in &split.range_perp {
                    v = linalg::add_scaled(&v, b, rng.gen_range(-1.0..1.0));
                }
                let mut fx = vec![0.0; scn.target_dim()];
                for b in &split.range {
                    fx = linalg::add_scaled(&fx, b, rng.gen_range(-1.0..1.0));
                }
                let s = scn.shape_operator(&split, &v, &fx).unwrap();
                let x = split.pullback(&fx).unwrap();
                for fy in &split.range {
                    let y = split.pullback(fy).unwrap();
                    let sff = scn.second_fundamental_form(&split, &x, &y).unwrap();
                    let lhs = linalg::g_inner(&split.g_target, &s, fy);
                    let rhs = linalg::g_inner(&split.g_target, &sff, &v);
                    assert!((lhs - rhs).abs() < 1e-8, "duality broken: {lhs} vs {rhs}");
                }
                // tensoriality in V
                let s2 = scn
                    .shape_operator(&split, &linalg::scale(&v, 2.0), &fx)
                    .unwrap();
                for a in 0..scn.target_dim() {
                    assert!((s2[a] - 2.0 * s[a]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn normal_connection_of_constant_perp_field_is_zero_on_flat_directions() {
        let scn = fixtures::paper_semi_slant();
        let p = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let split = scn.frame_split(&p).unwrap();
        // constant combination of the two perp directions
        let alpha = fixtures::SLANT_ANGLE;
        let vfield = vec![
            Expr::constant(libm::cos(alpha)),
            Expr::constant(0.4),
            Expr::constant(0.0),
            Expr::constant(0.0),
            Expr::constant(0.0),
            Expr::constant(-libm::sin(alpha)),
        ];
        let x = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        let out = scn.normal_connection(&split, &x, &vfield).unwrap();
        assert!(out.iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn normal_connection_output_is_perp_and_matches_finite_differences() {
        let scn = fixtures::paper_semi_slant();
        let alpha = fixtures::SLANT_ANGLE;
        let names = ["y1", "y2", "y3", "y4", "y5", "y6"];
        // y5·(cos α, 0, 0, 0, 0, −sin α) + y3·e₂′ stays perp everywhere
        let vfield: Vec<Expr> = [
            alloc::format!("{}*y5", libm::cos(alpha)),
            alloc::string::String::from("y3"),
            alloc::string::String::from("0"),
            alloc::string::String::from("0"),
            alloc::string::String::from("0"),
            alloc::format!("-{}*y5", libm::sin(alpha)),
        ]
        .iter()
        .map(|s| crate::expr::parse(s, &names).unwrap())
        .collect();

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(47);
        for _ in 0..5 {
            let p = random_point(&mut rng, false);
            let split = scn.frame_split(&p).unwrap();
            let x: Vec<f64> = split.horizontal[rng.gen_range(0..4)].clone();
            let out = scn.normal_connection(&split, &x, &vfield).unwrap();
            // projection property
            for r in &split.range {
                assert!(linalg::g_inner(&split.g_target, &out, r).abs() < 1e-10);
            }
            // finite-difference transport oracle
            let h = 1e-6;
            let p_hi = linalg::add_scaled(&p, &x, h);
            let p_lo = linalg::add_scaled(&p, &x, -h);
            let q_hi = scn.map_at(&p_hi).unwrap();
            let q_lo = scn.map_at(&p_lo).unwrap();
            let v_hi: Vec<f64> = vfield.iter().map(|e| e.eval(&q_hi).unwrap()).collect();
            let v_lo: Vec<f64> = vfield.iter().map(|e| e.eval(&q_lo).unwrap()).collect();
            let vdot: Vec<f64> = v_hi
                .iter()
                .zip(&v_lo)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect();
            let fx = split.jacobian.matvec(&x);
            let value: Vec<f64> = vfield.iter().map(|e| e.eval(&split.image).unwrap()).collect();
            let transported = scn
                .target
                .covariant_from_samples(&split.image, &fx, &value, &vdot)
                .unwrap();
            let oracle = split.perp_project(&transported);
            for a in 0..6 {
                assert!((out[a] - oracle[a]).abs() < 1e-5, "{out:?} vs {oracle:?}");
            }
        }
    }

    #[test]
    fn normal_connection_rejects_non_perp_fields() {
        let scn = fixtures::paper_semi_slant();
        let split = scn.frame_split(&scn.sample_points[0]).unwrap();
        let vfield: Vec<Expr> = (0..6).map(|_| Expr::constant(0.5)).collect();
        let x = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        assert!(matches!(
            scn.normal_connection(&split, &x, &vfield),
            Err(MapError::NotPerp { .. })
        ));
    }

    #[test]
    fn identity_map_is_umbilical_with_zero_mean_curvature() {
        let scn = fixtures::euclidean_identity();
        let split = scn.frame_split(&scn.sample_points[0]).unwrap();
        let check = scn.is_umbilical(&split).unwrap();
        assert!(check.verdict);
        assert!(check.mean_curvature.iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn semi_fixture_is_umbilical_with_zero_mean_curvature() {
        let scn = fixtures::paper_semi_slant();
        for p in &scn.sample_points {
            let split = scn.frame_split(p).unwrap();
            let check = scn.is_umbilical(&split).unwrap();
            assert!(check.verdict, "residual {}", check.residual);
            let h_norm = linalg::g_norm(&split.g_target, &check.mean_curvature);
            assert!(h_norm < 1e-10);

            // frame-sum oracle computed independently of mean_curvature
            let mut h = vec![0.0; 6];
            for hi in &split.horizontal {
                let sff = scn.second_fundamental_form(&split, hi, hi).unwrap();
                h = linalg::add_scaled(&h, &sff, 1.0);
            }
            assert!(h.iter().all(|c| c.abs() < 1e-10));
        }
    }

    #[test]
    fn hemi_fixture_is_not_umbilical_and_h_matches_hand_value() {
        let scn = fixtures::paper_hemi_slant();
        let split = scn.frame_split(&scn.sample_points[0]).unwrap();
        let check = scn.is_umbilical(&split).unwrap();
        assert!(!check.verdict);
        // H = (1/3)·SFF(e₃, e₃) = −(1/3) ∂y₄
        let expect = [0.0, 0.0, 0.0, -1.0 / 3.0, 0.0, 0.0];
        for (got, want) in check.mean_curvature.iter().zip(&expect) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!((check.residual - 2.0 / 3.0).abs() < 1e-10, "{}", check.residual);
    }

    #[test]
    fn tension_field_traces_the_sff() {
        let id = fixtures::euclidean_identity();
        let split = id.frame_split(&id.sample_points[0]).unwrap();
        assert!(id
            .tension_field(&split)
            .unwrap()
            .iter()
            .all(|c| c.abs() < 1e-12));

        let semi = fixtures::paper_semi_slant();
        let split = semi.frame_split(&semi.sample_points[1]).unwrap();
        let tau = semi.tension_field(&split).unwrap();
        assert!(linalg::g_norm(&split.g_target, &tau) < 1e-8);

        let hemi = fixtures::paper_hemi_slant();
        let split = hemi.frame_split(&hemi.sample_points[0]).unwrap();
        let tau = hemi.tension_field(&split).unwrap();
        let expect = [0.0, 0.0, 0.0, -1.0, 0.0, 0.0];
        for (got, want) in tau.iter().zip(&expect) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn sff_component_matrix_is_symmetric_and_sums_to_frame_free_norm() {
        let scn = fixtures::paper_hemi_slant();
        let split = scn.frame_split(&scn.sample_points[2]).unwrap();
        let comps = scn.sff_component_matrix(&split).unwrap();
        let mut from_components = 0.0;
        for b in &comps {
            assert!(b.symmetry_defect() < 1e-10);
            for i in 0..split.rank() {
                for j in 0..split.rank() {
                    from_components += b[(i, j)] * b[(i, j)];
                }
            }
        }
        let mut frame_free = 0.0;
        for hi in &split.horizontal {
            for hj in &split.horizontal {
                let sff = scn.second_fundamental_form(&split, hi, hj).unwrap();
                let norm = linalg::g_norm(&split.g_target, &sff);
                frame_free += norm * norm;
            }
        }
        assert!((from_components - frame_free).abs() < 1e-9);
    }

    #[test]
    fn fixture_perp_distributions_are_totally_geodesic() {
        for scn in [
            fixtures::paper_semi_slant(),
            fixtures::paper_hemi_slant(),
            fixtures::horosphere(),
        ] {
            for p in &scn.sample_points {
                let split = scn.frame_split(p).unwrap();
                let res = scn.perp_totally_geodesic_residual(&split).unwrap();
                assert!(res < 1e-10, "residual {res}");
            }
        }
    }

    #[test]
    fn horosphere_is_umbilical_with_constant_mean_curvature() {
        let scn = fixtures::horosphere();
        for p in &scn.sample_points {
            let split = scn.frame_split(p).unwrap();
            let check = scn.is_umbilical(&split).unwrap();
            assert!(check.verdict, "residual {}", check.residual);
            // H = c ∂y₁ with c = −10/3
            assert!((check.mean_curvature[0] + 10.0 / 3.0).abs() < 1e-9);
            assert!(check.mean_curvature[1].abs() < 1e-9);
            assert!(check.mean_curvature[2].abs() < 1e-9);
        }
    }
}
