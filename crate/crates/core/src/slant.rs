//! Tangential/normal decomposition of the complex structure over the range
//! of the map, and classification of the range from the spectrum of −φ².
//!
//! In the orthonormal range frame {F_*e_j} and perp frame {V_a}:
//!
//! ```text
//! J F_*e_j = Σ_i φ[i][j] F_*e_i + Σ_a ω[a][j] V_a
//! J V_a    = Σ_i B[i][a] F_*e_i + Σ_b C[b][a] V_b
//! ```
//!
//! φ is skew-adjoint, so −φ² is symmetric positive semidefinite with
//! spectrum in [0, 1]; eigenvalue 1 marks invariant directions, 0 marks
//! anti-invariant ones, and λ ∈ (0, 1) a slant direction at angle
//! θ = arccos √λ.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cstruct::CStructError;
use crate::linalg::{self, LinalgError, Mat};
use crate::rmap::{FrameSplit, MapError, MapScenario};

#[derive(Debug, Clone, PartialEq)]
pub enum SlantError {
    Map(MapError),
    CStruct(CStructError),
    Linalg(LinalgError),
    MissingComplexStructure,
    /// φ failed a structural invariant (skewness or spectrum bounds).
    BadOperators(String),
    NeedsTwoSamplePoints,
}

impl fmt::Display for SlantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlantError::Map(e) => write!(f, "{e}"),
            SlantError::CStruct(e) => write!(f, "{e}"),
            SlantError::Linalg(e) => write!(f, "{e}"),
            SlantError::MissingComplexStructure => {
                write!(f, "scenario declares no complex structure")
            }
            SlantError::BadOperators(msg) => write!(f, "{msg}"),
            SlantError::NeedsTwoSamplePoints => {
                write!(f, "classification needs at least two sample points")
            }
        }
    }
}

impl From<MapError> for SlantError {
    fn from(e: MapError) -> Self {
        SlantError::Map(e)
    }
}

impl From<CStructError> for SlantError {
    fn from(e: CStructError) -> Self {
        SlantError::CStruct(e)
    }
}

impl From<LinalgError> for SlantError {
    fn from(e: LinalgError) -> Self {
        SlantError::Linalg(e)
    }
}

/// The four block operators of J against the range/perp frames at a point.
#[derive(Debug, Clone)]
pub struct TangencyOperators {
    /// r×r range→range block.
    pub phi: Mat,
    /// (n−r)×r range→perp block.
    pub omega: Mat,
    /// r×(n−r) perp→range block.
    pub b_op: Mat,
    /// (n−r)×(n−r) perp→perp block.
    pub c_op: Mat,
    /// J evaluated at the image point.
    pub j_matrix: Mat,
}

/// φ/ω/B/C applied to coordinate vectors through the frame projectors,
/// independent of any basis ordering inside the clusters.
pub struct JFrame<'a> {
    pub split: &'a FrameSplit,
    pub j: Mat,
}

impl<'a> JFrame<'a> {
    pub fn new(scn: &MapScenario, split: &'a FrameSplit) -> Result<JFrame<'a>, SlantError> {
        let j = scn
            .complex_structure
            .as_ref()
            .ok_or(SlantError::MissingComplexStructure)?
            .j_at(&split.image)?;
        Ok(JFrame { split, j })
    }

    pub fn j_apply(&self, w: &[f64]) -> Vec<f64> {
        self.j.matvec(w)
    }

    /// Range part of J applied to a range vector.
    pub fn phi(&self, w: &[f64]) -> Vec<f64> {
        self.split.range_project(&self.j_apply(w))
    }

    /// Perp part of J applied to a range vector.
    pub fn omega(&self, w: &[f64]) -> Vec<f64> {
        self.split.perp_project(&self.j_apply(w))
    }

    /// Range part of J applied to a perp vector.
    pub fn b(&self, v: &[f64]) -> Vec<f64> {
        self.split.range_project(&self.j_apply(v))
    }

    /// Perp part of J applied to a perp vector.
    pub fn c(&self, v: &[f64]) -> Vec<f64> {
        self.split.perp_project(&self.j_apply(v))
    }
}

/// Builds the φ/ω/B/C block matrices at a frame split.
pub fn decompose_j(scn: &MapScenario, split: &FrameSplit) -> Result<TangencyOperators, SlantError> {
    let frame = JFrame::new(scn, split)?;
    let r = split.rank();
    let perp = split.range_perp.len();
    let g = &split.g_target;

    let mut phi = Mat::zeros(r, r);
    let mut omega = Mat::zeros(perp, r);
    for (jcol, rj) in split.range.iter().enumerate() {
        let jr = frame.j_apply(rj);
        for (i, ri) in split.range.iter().enumerate() {
            phi[(i, jcol)] = linalg::g_inner(g, &jr, ri);
        }
        for (a, va) in split.range_perp.iter().enumerate() {
            omega[(a, jcol)] = linalg::g_inner(g, &jr, va);
        }
    }
    let mut b_op = Mat::zeros(r, perp);
    let mut c_op = Mat::zeros(perp, perp);
    for (acol, va) in split.range_perp.iter().enumerate() {
        let jv = frame.j_apply(va);
        for (i, ri) in split.range.iter().enumerate() {
            b_op[(i, acol)] = linalg::g_inner(g, &jv, ri);
        }
        for (bidx, vb) in split.range_perp.iter().enumerate() {
            c_op[(bidx, acol)] = linalg::g_inner(g, &jv, vb);
        }
    }
    Ok(TangencyOperators {
        phi,
        omega,
        b_op,
        c_op,
        j_matrix: frame.j,
    })
}

/// One eigenvalue cluster of −φ².
#[derive(Debug, Clone)]
pub struct SlantCluster {
    pub lambda: f64,
    pub multiplicity: usize,
    /// θ = arccos √λ.
    pub angle: f64,
    /// Orthonormal basis of the cluster inside the range, in range-frame
    /// coordinates.
    pub frame_basis: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct SlantSpectrum {
    /// Clusters sorted by λ descending.
    pub clusters: Vec<SlantCluster>,
}

/// Eigen-decomposition of −φ² with eigenvalues merged within
/// `cluster_tol`.
pub fn slant_spectrum(
    ops: &TangencyOperators,
    cluster_tol: f64,
) -> Result<SlantSpectrum, SlantError> {
    let r = ops.phi.rows();
    let skew = {
        let mut worst = 0.0f64;
        for i in 0..r {
            for j in 0..r {
                worst = worst.max((ops.phi[(i, j)] + ops.phi[(j, i)]).abs());
            }
        }
        worst
    };
    if skew > 1e-9 {
        return Err(SlantError::BadOperators(format!(
            "φ is not skew-adjoint in the orthonormal range frame (defect {skew:e})"
        )));
    }
    let phi2 = ops.phi.matmul(&ops.phi);
    let mut minus_phi2 = Mat::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            minus_phi2[(i, j)] = -0.5 * (phi2[(i, j)] + phi2[(j, i)]);
        }
    }
    let eig = linalg::jacobi_eigen(&minus_phi2)?;
    for v in &eig.values {
        if *v < -1e-9 || *v > 1.0 + 1e-9 {
            return Err(SlantError::BadOperators(format!(
                "eigenvalue {v} of −φ² escapes [0, 1]"
            )));
        }
    }
    let mut clusters: Vec<SlantCluster> = Vec::new();
    for (idx, &lambda) in eig.values.iter().enumerate() {
        let vector = eig.vectors.col(idx);
        match clusters.last_mut() {
            Some(c) if (c.lambda - lambda).abs() <= cluster_tol => {
                // running mean keeps the representative stable
                let total = c.multiplicity as f64;
                c.lambda = (c.lambda * total + lambda) / (total + 1.0);
                c.multiplicity += 1;
                c.frame_basis.push(vector);
            }
            _ => clusters.push(SlantCluster {
                lambda,
                multiplicity: 1,
                angle: 0.0,
                frame_basis: vec![vector],
            }),
        }
    }
    for c in &mut clusters {
        let clamped = c.lambda.clamp(0.0, 1.0);
        c.lambda = clamped;
        c.angle = libm::acos(libm::sqrt(clamped));
    }
    Ok(SlantSpectrum { clusters })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlantLabel {
    Invariant,
    AntiInvariant,
    Slant,
    SemiSlant,
    HemiSlant,
    Generic,
}

impl fmt::Display for SlantLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SlantLabel::Invariant => "invariant",
            SlantLabel::AntiInvariant => "anti-invariant",
            SlantLabel::Slant => "slant",
            SlantLabel::SemiSlant => "semi-slant",
            SlantLabel::HemiSlant => "hemi-slant",
            SlantLabel::Generic => "generic",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub label: SlantLabel,
    /// Clusters at the first sample point, λ descending.
    pub clusters: Vec<SlantCluster>,
    /// Max per-cluster λ deviation across sample points.
    pub constancy: f64,
    pub diagnostics: Vec<String>,
}

impl Classification {
    /// The angle of the proper slant cluster, when one exists.
    pub fn slant_angle(&self) -> Option<f64> {
        self.clusters
            .iter()
            .find(|c| c.lambda > 1e-6 && c.lambda < 1.0 - 1e-6)
            .map(|c| c.angle)
    }

    pub fn multiplicity_of(&self, which: SlantLabel) -> usize {
        self.clusters
            .iter()
            .filter(|c| match which {
                SlantLabel::Invariant => c.lambda >= 1.0 - 1e-6,
                SlantLabel::AntiInvariant => c.lambda <= 1e-6,
                SlantLabel::Slant => c.lambda > 1e-6 && c.lambda < 1.0 - 1e-6,
                _ => false,
            })
            .map(|c| c.multiplicity)
            .sum()
    }
}

/// Classifies the range across every sample point; any structural
/// disagreement between points degrades the label to `Generic` with a
/// diagnostic rather than guessing.
pub fn classify(scn: &MapScenario) -> Result<Classification, SlantError> {
    if scn.sample_points.len() < 2 {
        return Err(SlantError::NeedsTwoSamplePoints);
    }
    let cluster_tol = scn.tol.cluster;
    let mut spectra = Vec::new();
    for p in &scn.sample_points {
        let split = scn.frame_split(p)?;
        let ops = decompose_j(scn, &split)?;
        spectra.push(slant_spectrum(&ops, cluster_tol)?);
    }
    let first = &spectra[0];
    let mut diagnostics = Vec::new();
    let mut constancy = 0.0f64;
    let mut structure_ok = true;
    for (k, spec) in spectra.iter().enumerate().skip(1) {
        if spec.clusters.len() != first.clusters.len()
            || spec
                .clusters
                .iter()
                .zip(&first.clusters)
                .any(|(a, b)| a.multiplicity != b.multiplicity)
        {
            structure_ok = false;
            diagnostics.push(format!(
                "cluster structure at sample point {k} differs from point 0"
            ));
            continue;
        }
        for (a, b) in spec.clusters.iter().zip(&first.clusters) {
            constancy = constancy.max((a.lambda - b.lambda).abs());
        }
    }
    let label = if !structure_ok || constancy >= scn.tol.angle {
        if structure_ok {
            diagnostics.push(format!(
                "slant angle drifts across sample points (max λ deviation {constancy:e})"
            ));
        }
        SlantLabel::Generic
    } else {
        label_from_clusters(&first.clusters, cluster_tol)
    };
    Ok(Classification {
        label,
        clusters: first.clusters.clone(),
        constancy,
        diagnostics,
    })
}

fn label_from_clusters(clusters: &[SlantCluster], tol: f64) -> SlantLabel {
    let is_one = |l: f64| (l - 1.0).abs() < tol;
    let is_zero = |l: f64| l.abs() < tol;
    let is_proper = |l: f64| l > tol && l < 1.0 - tol;
    match clusters {
        [only] if is_one(only.lambda) => SlantLabel::Invariant,
        [only] if is_zero(only.lambda) => SlantLabel::AntiInvariant,
        [only] if is_proper(only.lambda) => SlantLabel::Slant,
        [hi, lo] if is_one(hi.lambda) && is_proper(lo.lambda) => SlantLabel::SemiSlant,
        [hi, lo] if is_proper(hi.lambda) && is_zero(lo.lambda) => SlantLabel::HemiSlant,
        _ => SlantLabel::Generic,
    }
}

/// Lifts a cluster basis from range-frame coordinates to target
/// coordinate vectors.
pub fn cluster_target_basis(split: &FrameSplit, cluster: &SlantCluster) -> Vec<Vec<f64>> {
    cluster
        .frame_basis
        .iter()
        .map(|coeffs| {
            let mut v = vec![0.0; split.image.len()];
            for (c, r) in coeffs.iter().zip(&split.range) {
                v = linalg::add_scaled(&v, r, *c);
            }
            v
        })
        .collect()
}

/// Projects a target vector onto the span of a cluster (inside the range).
pub fn cluster_project(split: &FrameSplit, cluster: &SlantCluster, w: &[f64]) -> Vec<f64> {
    let basis = cluster_target_basis(split, cluster);
    let mut out = vec![0.0; w.len()];
    for b in &basis {
        let c = linalg::g_inner(&split.g_target, w, b);
        out = linalg::add_scaled(&out, b, c);
    }
    out
}
