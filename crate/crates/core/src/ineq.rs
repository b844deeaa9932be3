//! Adapted-frame bookkeeping for the curvature inequalities: the squared
//! J-pairing sum Σ_{i,j} g_N(F_*e_i, JF_*e_j)², its closed forms for
//! semi-slant (2r₁ + 2r₂cos²θ) and hemi-slant (2r₂cos²θ) ranges, Casorati
//! curvature as the normalized squared length of the second fundamental
//! form, and slack evaluation with caller-supplied intrinsic scalars.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{self, Mat};
use crate::rmap::{FrameSplit, MapError, MapScenario};
use crate::slant::{
    self, cluster_target_basis, Classification, SlantError, SlantLabel, SlantSpectrum,
};

#[derive(Debug, Clone, PartialEq)]
pub enum IneqError {
    Map(MapError),
    Slant(SlantError),
    /// The Casorati slack form needs rank ≥ 3.
    RankTooSmall { rank: usize },
    Frame(String),
}

impl fmt::Display for IneqError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IneqError::Map(e) => write!(f, "{e}"),
            IneqError::Slant(e) => write!(f, "{e}"),
            IneqError::RankTooSmall { rank } => {
                write!(f, "Casorati slack needs rank ≥ 3, scenario has rank {rank}")
            }
            IneqError::Frame(msg) => write!(f, "adapted frame construction failed: {msg}"),
        }
    }
}

impl From<MapError> for IneqError {
    fn from(e: MapError) -> Self {
        IneqError::Map(e)
    }
}

impl From<SlantError> for IneqError {
    fn from(e: SlantError) -> Self {
        IneqError::Slant(e)
    }
}

/// Σ_{i,j} g_N(F_*e_i, JF_*e_j)² over any orthonormal range frame; equals
/// the squared Frobenius norm of φ and is therefore frame independent.
pub fn frame_j_sum(scn: &MapScenario, split: &FrameSplit) -> Result<f64, IneqError> {
    let ops = slant::decompose_j(scn, split)?;
    let r = ops.phi.rows();
    let mut sum = 0.0;
    for i in 0..r {
        for j in 0..r {
            sum += ops.phi[(i, j)] * ops.phi[(i, j)];
        }
    }
    Ok(sum)
}

/// Casorati curvature (1/r)·Σ_{α,i,j} (B^α_{ij})².
pub fn casorati(scn: &MapScenario, split: &FrameSplit) -> Result<f64, IneqError> {
    let comps = scn.sff_component_matrix(split)?;
    Ok(casorati_from_components(&comps, split.rank()))
}

pub fn casorati_from_components(comps: &[Mat], rank: usize) -> f64 {
    let mut sum = 0.0;
    for b in comps {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                sum += b[(i, j)] * b[(i, j)];
            }
        }
    }
    sum / rank as f64
}

/// The adapted orthonormal range frame: invariant J-pairs first, then
/// slant pairs (e, sec θ · φe), then the anti-invariant leftovers.
pub fn adapted_range_frame(
    scn: &MapScenario,
    split: &FrameSplit,
    spectrum: &SlantSpectrum,
) -> Result<Vec<Vec<f64>>, IneqError> {
    let jframe = slant::JFrame::new(scn, split)?;
    let g = &split.g_target;
    let mut frame: Vec<Vec<f64>> = Vec::new();

    let pair_up = |cluster_basis: Vec<Vec<f64>>,
                       partner: &dyn Fn(&[f64]) -> Vec<f64>,
                       frame: &mut Vec<Vec<f64>>|
     -> Result<(), IneqError> {
        let mut pool = cluster_basis;
        loop {
            // strip what the frame already spans
            let mut seed = frame.clone();
            let taken = frame.len();
            seed.extend(pool.iter().cloned());
            let kept = linalg::gram_schmidt(g, &seed, 1e-8).basis;
            pool = kept[taken..].to_vec();
            let Some(u) = pool.first().cloned() else {
                return Ok(());
            };
            let v = partner(&u);
            let norm = linalg::g_norm(g, &v);
            if (norm - 1.0).abs() > 1e-6 {
                return Err(IneqError::Frame(format_partner_norm(norm)));
            }
            frame.push(u);
            frame.push(v);
        }
    };

    for cluster in &spectrum.clusters {
        if cluster.lambda >= 1.0 - 1e-6 {
            let basis = cluster_target_basis(split, cluster);
            pair_up(basis, &|u| jframe.j_apply(u), &mut frame)?;
        }
    }
    for cluster in &spectrum.clusters {
        if cluster.lambda > 1e-6 && cluster.lambda < 1.0 - 1e-6 {
            let basis = cluster_target_basis(split, cluster);
            let sec = 1.0 / libm::sqrt(cluster.lambda);
            pair_up(basis, &|u| linalg::scale(&jframe.phi(u), sec), &mut frame)?;
        }
    }
    for cluster in &spectrum.clusters {
        if cluster.lambda <= 1e-6 {
            for v in cluster_target_basis(split, cluster) {
                frame.push(v);
            }
        }
    }
    if frame.len() != split.rank() {
        return Err(IneqError::Frame(alloc::format!(
            "adapted frame has {} vectors, expected rank {}",
            frame.len(),
            split.rank()
        )));
    }
    Ok(frame)
}

fn format_partner_norm(norm: f64) -> String {
    alloc::format!("J-partner is not unit (norm {norm})")
}

/// Everything the slack formulas consume, evaluated at one sample point.
#[derive(Debug, Clone)]
pub struct FrameSumReport {
    pub label: SlantLabel,
    pub rank: usize,
    /// Invariant J-pair count r₁.
    pub invariant_pairs: usize,
    /// Slant pair count r₂.
    pub slant_pairs: usize,
    pub anti_invariant_dim: usize,
    pub angle: Option<f64>,
    pub sum_computed: f64,
    /// 2r₁ + 2r₂cos²θ (semi-slant family) or 2r₂cos²θ (hemi-slant family);
    /// absent for a generic range.
    pub sum_closed_form: Option<f64>,
    pub casorati: f64,
    /// g_N(F_*e₁, JF_*e₂)² in the adapted frame.
    pub first_pair_square: f64,
    /// Equality pattern of the Casorati bound:
    /// B^α₁₁ = … = B^α_{r−1,r−1} = ½B^α_{rr} with zero off-diagonals.
    pub casorati_equality: bool,
}

/// Builds the report at one sample point, given the scenario-wide
/// classification.
pub fn frame_sum_report(
    scn: &MapScenario,
    split: &FrameSplit,
    classification: &Classification,
) -> Result<FrameSumReport, IneqError> {
    let ops = slant::decompose_j(scn, split)?;
    let spectrum = slant::slant_spectrum(&ops, scn.tol.cluster)?;
    let sum_computed = frame_j_sum(scn, split)?;
    let cas = casorati(scn, split)?;

    let invariant_dim = classification.multiplicity_of(SlantLabel::Invariant);
    let slant_dim = classification.multiplicity_of(SlantLabel::Slant);
    let anti_dim = classification.multiplicity_of(SlantLabel::AntiInvariant);
    let r1 = invariant_dim / 2;
    let r2 = slant_dim / 2;
    let angle = classification.slant_angle();
    let cos2 = angle.map(|a| libm::cos(a) * libm::cos(a));

    let sum_closed_form = match classification.label {
        SlantLabel::Invariant => Some(2.0 * r1 as f64),
        SlantLabel::AntiInvariant => Some(0.0),
        SlantLabel::Slant => cos2.map(|c| 2.0 * r2 as f64 * c),
        SlantLabel::SemiSlant => cos2.map(|c| 2.0 * r1 as f64 + 2.0 * r2 as f64 * c),
        SlantLabel::HemiSlant => cos2.map(|c| 2.0 * r2 as f64 * c),
        SlantLabel::Generic => None,
    };

    let adapted = adapted_range_frame(scn, split, &spectrum)?;
    let first_pair_square = if adapted.len() >= 2 {
        let jframe = slant::JFrame::new(scn, split)?;
        let je2 = jframe.j_apply(&adapted[1]);
        let v = linalg::g_inner(&split.g_target, &adapted[0], &je2);
        v * v
    } else {
        0.0
    };

    let comps = scn.sff_component_matrix(split)?;
    let casorati_equality = casorati_equality_case(&comps, 1e-8);

    Ok(FrameSumReport {
        label: classification.label,
        rank: split.rank(),
        invariant_pairs: r1,
        slant_pairs: r2,
        anti_invariant_dim: anti_dim,
        angle,
        sum_computed,
        sum_closed_form,
        casorati: cas,
        first_pair_square,
        casorati_equality,
    })
}

/// Checks the Casorati equality pattern on the component matrices.
pub fn casorati_equality_case(comps: &[Mat], tol: f64) -> bool {
    for b in comps {
        let r = b.rows();
        for i in 0..r {
            for j in 0..r {
                if i != j && b[(i, j)].abs() > tol {
                    return false;
                }
            }
        }
        if r >= 2 {
            let head = b[(0, 0)];
            for i in 1..(r - 1) {
                if (b[(i, i)] - head).abs() > tol {
                    return false;
                }
            }
            if (b[(r - 1, r - 1)] - 2.0 * head).abs() > tol {
                return false;
            }
        }
    }
    true
}

/// Caller-supplied intrinsic scalars for the slack formulas.
#[derive(Debug, Clone, Copy)]
pub struct IntrinsicInputs {
    /// Holomorphic sectional curvature constant of the target space form.
    pub c: f64,
    /// Scalar curvature of the horizontal space.
    pub rho: f64,
    /// Squared norm of the horizontal mean curvature trace.
    pub tau_norm_sq: f64,
    /// Sectional curvature of the comparison plane.
    pub k_plane: f64,
    /// Normalized Casorati bound input.
    pub delta_c: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SlackReport {
    pub casorati_slack: f64,
    pub chen_slack: f64,
}

/// Evaluates both slack expressions; signs are reported, never judged.
///
/// ```text
/// casorati = δ_C(r−1) + c/4 + 3c·sum/(4r(r−1)) − ρ
/// chen     = K − ½(2ρ − (r−2)/(r−1)·‖τ‖² − c(r²−r−2) − 3c(sum − 2·e₁Je₂²))
/// ```
pub fn inequality_slack(
    report: &FrameSumReport,
    inputs: &IntrinsicInputs,
) -> Result<SlackReport, IneqError> {
    let r = report.rank;
    if r < 3 {
        return Err(IneqError::RankTooSmall { rank: r });
    }
    let rf = r as f64;
    let sum = report.sum_computed;
    let casorati_slack = inputs.delta_c * (rf - 1.0) + inputs.c / 4.0
        + 3.0 * inputs.c * sum / (4.0 * rf * (rf - 1.0))
        - inputs.rho;
    let chen_slack = inputs.k_plane
        - 0.5
            * (2.0 * inputs.rho
                - (rf - 2.0) / (rf - 1.0) * inputs.tau_norm_sq
                - inputs.c * (rf * rf - rf - 2.0)
                - 3.0 * inputs.c * (sum - 2.0 * report.first_pair_square));
    Ok(SlackReport {
        casorati_slack,
        chen_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::Rng;
    use rand::SeedableRng;

    fn report_for(scn: &MapScenario) -> FrameSumReport {
        let classification = slant::classify(scn).unwrap();
        let split = scn.frame_split(&scn.sample_points[0]).unwrap();
        frame_sum_report(scn, &split, &classification).unwrap()
    }

    #[test]
    fn semi_fixture_sum_matches_closed_form() {
        let scn = fixtures::paper_semi_slant();
        let report = report_for(&scn);
        assert_eq!(report.invariant_pairs, 1);
        assert_eq!(report.slant_pairs, 1);
        // 2·1 + 2·1·cos²(π/6) = 3.5
        assert!((report.sum_computed - 3.5).abs() < 1e-8, "{}", report.sum_computed);
        let closed = report.sum_closed_form.unwrap();
        assert!((report.sum_computed - closed).abs() < 1e-8);
    }

    #[test]
    fn hemi_fixture_sum_matches_closed_form() {
        let scn = fixtures::paper_hemi_slant();
        let report = report_for(&scn);
        assert_eq!(report.slant_pairs, 1);
        assert_eq!(report.anti_invariant_dim, 1);
        assert!((report.sum_computed - 1.5).abs() < 1e-8, "{}", report.sum_computed);
        let closed = report.sum_closed_form.unwrap();
        assert!((report.sum_computed - closed).abs() < 1e-8);
    }

    #[test]
    fn invariant_and_anti_invariant_ranges_have_expected_sums() {
        let id = fixtures::euclidean_identity();
        let report = report_for(&id);
        assert!((report.sum_computed - 4.0).abs() < 1e-10);
        assert!((report.sum_closed_form.unwrap() - 4.0).abs() < 1e-10);

        let anti = fixtures::anti_invariant_line();
        let report = report_for(&anti);
        assert!(report.sum_computed.abs() < 1e-12);
        assert!(report.sum_closed_form.unwrap().abs() < 1e-12);
    }

    #[test]
    fn frame_j_sum_is_frame_independent() {
        let scn = fixtures::paper_semi_slant();
        let split = scn.frame_split(&scn.sample_points[2]).unwrap();
        let base = frame_j_sum(&scn, &split).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(83);
        let raw: Vec<Vec<f64>> = (0..split.rank())
            .map(|_| {
                let mut v = vec![0.0; 6];
                for b in &split.range {
                    v = linalg::add_scaled(&v, b, rng.gen_range(-1.0..1.0));
                }
                v
            })
            .collect();
        let rotated = linalg::gram_schmidt(&split.g_target, &raw, 1e-8).basis;
        assert_eq!(rotated.len(), split.rank());
        let mut shuffled = split.clone();
        shuffled.range = rotated;
        let rotated_sum = frame_j_sum(&scn, &shuffled).unwrap();
        assert!((base - rotated_sum).abs() < 1e-9);
    }

    #[test]
    fn adapted_frame_first_pair_squares_to_one_with_invariant_pairs() {
        let scn = fixtures::paper_semi_slant();
        let report = report_for(&scn);
        assert!((report.first_pair_square - 1.0).abs() < 1e-10);
    }

    #[test]
    fn casorati_vanishes_for_totally_geodesic_maps() {
        let scn = fixtures::paper_semi_slant();
        let split = scn.frame_split(&scn.sample_points[0]).unwrap();
        assert!(casorati(&scn, &split).unwrap() < 1e-18);
    }

    #[test]
    fn hemi_fixture_casorati_matches_hand_value() {
        // one nonzero component B(e₃,e₃) = −1 over rank 3
        let scn = fixtures::paper_hemi_slant();
        let split = scn.frame_split(&scn.sample_points[0]).unwrap();
        let cas = casorati(&scn, &split).unwrap();
        assert!((cas - 1.0 / 3.0).abs() < 1e-10, "{cas}");
    }

    #[test]
    fn casorati_is_quadratic_in_the_components() {
        let mut b = Mat::zeros(2, 2);
        b[(0, 0)] = 0.7;
        b[(0, 1)] = -0.2;
        b[(1, 0)] = -0.2;
        b[(1, 1)] = 1.1;
        let base = casorati_from_components(&[b.clone()], 2);
        let mut doubled = Mat::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                doubled[(i, j)] = 2.0 * b[(i, j)];
            }
        }
        let scaled = casorati_from_components(&[doubled], 2);
        assert!((scaled - 4.0 * base).abs() < 1e-14);
    }

    #[test]
    fn casorati_agrees_with_frame_free_summation() {
        let scn = fixtures::paper_hemi_slant();
        let split = scn.frame_split(&scn.sample_points[3]).unwrap();
        let cas = casorati(&scn, &split).unwrap();
        let mut frame_free = 0.0;
        for hi in &split.horizontal {
            for hj in &split.horizontal {
                let sff = scn.second_fundamental_form(&split, hi, hj).unwrap();
                let norm = linalg::g_norm(&split.g_target, &sff);
                frame_free += norm * norm;
            }
        }
        frame_free /= split.rank() as f64;
        assert!((cas - frame_free).abs() < 1e-9);
    }

    #[test]
    fn zero_inputs_give_zero_slack() {
        let scn = fixtures::euclidean_identity();
        let mut report = report_for(&scn);
        report.sum_computed = 0.0;
        let inputs = IntrinsicInputs {
            c: 0.0,
            rho: 0.0,
            tau_norm_sq: 0.0,
            k_plane: 0.0,
            delta_c: 0.0,
        };
        let slack = inequality_slack(&report, &inputs).unwrap();
        assert_eq!(slack.casorati_slack, 0.0);
        assert_eq!(slack.chen_slack, 0.0);
    }

    #[test]
    fn worked_casorati_slack_example() {
        // r = 4, r₁ = r₂ = 1, θ = π/6, c = 4, δ_C = 1, ρ = 0:
        // 3 + 1 + 12·3.5/48 = 4.875
        let scn = fixtures::paper_semi_slant();
        let report = report_for(&scn);
        let inputs = IntrinsicInputs {
            c: 4.0,
            rho: 0.0,
            tau_norm_sq: 0.0,
            k_plane: 0.0,
            delta_c: 1.0,
        };
        let slack = inequality_slack(&report, &inputs).unwrap();
        assert!((slack.casorati_slack - 4.875).abs() < 1e-8, "{}", slack.casorati_slack);
    }

    #[test]
    fn chen_slack_is_stable_under_closed_form_substitution() {
        let scn = fixtures::paper_hemi_slant();
        let report = report_for(&scn);
        let inputs = IntrinsicInputs {
            c: 2.0,
            rho: 0.7,
            tau_norm_sq: 0.3,
            k_plane: 1.1,
            delta_c: 0.4,
        };
        let direct = inequality_slack(&report, &inputs).unwrap();
        let mut substituted = report.clone();
        substituted.sum_computed = report.sum_closed_form.unwrap();
        let closed = inequality_slack(&substituted, &inputs).unwrap();
        assert!((direct.chen_slack - closed.chen_slack).abs() < 1e-8);
        assert!((direct.casorati_slack - closed.casorati_slack).abs() < 1e-8);
    }

    #[test]
    fn small_rank_rejects_the_casorati_form() {
        let scn = fixtures::anti_invariant_line();
        let report = report_for(&scn);
        let inputs = IntrinsicInputs {
            c: 1.0,
            rho: 0.0,
            tau_norm_sq: 0.0,
            k_plane: 0.0,
            delta_c: 0.0,
        };
        assert!(matches!(
            inequality_slack(&report, &inputs),
            Err(IneqError::RankTooSmall { rank: 1 })
        ));
    }

    #[test]
    fn totally_geodesic_components_satisfy_the_equality_pattern_trivially() {
        let scn = fixtures::paper_semi_slant();
        let split = scn.frame_split(&scn.sample_points[0]).unwrap();
        let comps = scn.sff_component_matrix(&split).unwrap();
        assert!(casorati_equality_case(&comps, 1e-8));

        // hemi fixture: B-matrix has equal diagonal head but the tail rule
        // B_rr = 2·B₁₁ fails (−1 ≠ 0), so the pattern must be rejected
        let scn = fixtures::paper_hemi_slant();
        let split = scn.frame_split(&scn.sample_points[0]).unwrap();
        let comps = scn.sff_component_matrix(&split).unwrap();
        assert!(!casorati_equality_case(&comps, 1e-8));
    }
}
