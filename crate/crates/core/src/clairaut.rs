//! Clairaut certificates and relation traces.
//!
//! A scenario is certified Clairaut for a potential g on the target when it
//! is umbilical and its mean curvature matches −∇^N g at every sample
//! point. The relation itself — (s̃∘β)·sin ψ constant with s̃ = e^g — is
//! traced empirically along geodesics in two modes:
//!
//! * source mode: β = F∘α for a source geodesic α, with sin ψ the kernel
//!   fraction of α̇ (the classical surface-of-revolution convention, the
//!   one a submersion-style scenario needs);
//! * target mode: β a target geodesic tracked back through the map by
//!   Gauss–Newton continuation, with sin ψ the range fraction of β̇.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{EvalError, Expr};
use crate::geom::{geodesic_integrate, GeomError};
use crate::linalg::{self, LinalgError, Mat};
use crate::rmap::{FrameSplit, MapError, MapScenario};

#[derive(Debug, Clone, PartialEq)]
pub enum ClairautError {
    Map(MapError),
    Geom(GeomError),
    Eval(EvalError),
    Linalg(LinalgError),
    ZeroVector,
    NoPotential,
    /// Preimage tracking lost the curve; carries the last time that still
    /// projected back onto the image.
    CurveLeftImage { last_good_t: f64 },
    GeodesicFailed(String),
}

impl fmt::Display for ClairautError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClairautError::Map(e) => write!(f, "{e}"),
            ClairautError::Geom(e) => write!(f, "{e}"),
            ClairautError::Eval(e) => write!(f, "{e}"),
            ClairautError::Linalg(e) => write!(f, "{e}"),
            ClairautError::ZeroVector => write!(f, "angle of the zero vector is undefined"),
            ClairautError::NoPotential => {
                write!(f, "no potential supplied and none declared by the scenario")
            }
            ClairautError::CurveLeftImage { last_good_t } => {
                write!(f, "curve left the image of the map after t = {last_good_t}")
            }
            ClairautError::GeodesicFailed(msg) => write!(f, "geodesic integration failed: {msg}"),
        }
    }
}

impl From<MapError> for ClairautError {
    fn from(e: MapError) -> Self {
        ClairautError::Map(e)
    }
}

impl From<GeomError> for ClairautError {
    fn from(e: GeomError) -> Self {
        ClairautError::Geom(e)
    }
}

impl From<EvalError> for ClairautError {
    fn from(e: EvalError) -> Self {
        ClairautError::Eval(e)
    }
}

impl From<LinalgError> for ClairautError {
    fn from(e: LinalgError) -> Self {
        ClairautError::Linalg(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialSource {
    Supplied,
    Fitted,
    Constant,
}

impl fmt::Display for PotentialSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PotentialSource::Supplied => "supplied",
            PotentialSource::Fitted => "fitted",
            PotentialSource::Constant => "constant",
        };
        write!(f, "{s}")
    }
}

/// Residuals of the two certificate conditions at one sample point.
#[derive(Debug, Clone, Copy)]
pub struct PointResiduals {
    pub umbilical: f64,
    pub gradient: f64,
}

#[derive(Debug, Clone)]
pub struct ClairautCertificate {
    pub potential_source: PotentialSource,
    pub potential: Expr,
    pub per_point: Vec<PointResiduals>,
    pub umbilical_residual: f64,
    pub gradient_residual: f64,
    pub verdict: bool,
}

/// ∇^N g at a target point: G⁻¹ · dg.
pub fn potential_gradient(
    scn: &MapScenario,
    g_expr: &Expr,
    q: &[f64],
) -> Result<Vec<f64>, ClairautError> {
    let n = scn.target_dim();
    let ginv = scn.target.inverse_metric_at(q)?;
    let mut dg = vec![0.0; n];
    for (a, slot) in dg.iter_mut().enumerate() {
        *slot = g_expr.derivative(a).eval(q)?;
    }
    Ok(ginv.matvec(&dg))
}

/// Certificate residuals at one sample point: umbilicity and
/// ‖H + ∇^N g‖ at F(p).
pub fn check_potential(
    scn: &MapScenario,
    g_expr: &Expr,
    p: &[f64],
) -> Result<PointResiduals, ClairautError> {
    let split = scn.frame_split(p)?;
    let umb = scn.is_umbilical(&split)?;
    let grad = potential_gradient(scn, g_expr, &split.image)?;
    let defect = linalg::add_scaled(&umb.mean_curvature, &grad, 1.0);
    Ok(PointResiduals {
        umbilical: umb.residual,
        gradient: linalg::g_norm(&split.g_target, &defect),
    })
}

/// Runs the full certificate over the scenario's sample points. The
/// potential is taken from `overridden`, else from the scenario, else
/// fitted from the mean curvature.
pub fn certify(
    scn: &MapScenario,
    overridden: Option<&Expr>,
) -> Result<ClairautCertificate, ClairautError> {
    let (potential, source) = match overridden {
        Some(g) => (g.clone(), PotentialSource::Supplied),
        None => match &scn.potential {
            Some(g) => (g.clone(), PotentialSource::Supplied),
            None => {
                let fit = fit_potential(scn)?;
                let constant = fit.coefficients.iter().all(|c| c.abs() < 1e-12);
                (
                    fit.potential,
                    if constant {
                        PotentialSource::Constant
                    } else {
                        PotentialSource::Fitted
                    },
                )
            }
        },
    };
    let mut per_point = Vec::new();
    let mut worst_umb = 0.0f64;
    let mut worst_grad = 0.0f64;
    for p in &scn.sample_points {
        let res = check_potential(scn, &potential, p)?;
        worst_umb = worst_umb.max(res.umbilical);
        worst_grad = worst_grad.max(res.gradient);
        per_point.push(res);
    }
    let verdict = worst_umb < scn.tol.check && worst_grad < scn.tol.check;
    Ok(ClairautCertificate {
        potential_source: source,
        potential,
        per_point,
        umbilical_residual: worst_umb,
        gradient_residual: worst_grad,
        verdict,
    })
}

/// One observation for the affine-potential fit.
#[derive(Debug, Clone)]
pub struct FitSample {
    pub metric: Mat,
    pub inverse_metric: Mat,
    pub mean_curvature: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FitResult {
    /// Coefficients c_a of g = Σ c_a y^a (the constant term is free and
    /// reported as zero).
    pub coefficients: Vec<f64>,
    pub per_point_residual: Vec<f64>,
    /// Eigenvalues of the normal matrix below tolerance, with their
    /// directions; nonempty means the fit is underdetermined.
    pub degenerate_directions: Vec<Vec<f64>>,
    pub potential: Expr,
}

/// Least squares for H ≈ −G⁻¹c over the given samples: the normal system
/// is (Σ G⁻¹) c = −Σ H since the error is measured in the metric norm.
pub fn fit_affine_potential(
    samples: &[FitSample],
    coord_names: &[&str],
) -> Result<FitResult, ClairautError> {
    let n = coord_names.len();
    let mut a = Mat::zeros(n, n);
    let mut b = vec![0.0; n];
    for s in samples {
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] += s.inverse_metric[(i, j)];
            }
            b[i] -= s.mean_curvature[i];
        }
    }
    let eig = linalg::jacobi_eigen(&a)?;
    let scale = eig.values[0].abs().max(1e-300);
    let mut degenerate = Vec::new();
    let mut coefficients = vec![0.0; n];
    for (k, &val) in eig.values.iter().enumerate() {
        let v = eig.vectors.col(k);
        if val.abs() < 1e-12 * scale {
            degenerate.push(v);
            continue;
        }
        let proj = linalg::dot(&v, &b) / val;
        coefficients = linalg::add_scaled(&coefficients, &v, proj);
    }
    let per_point_residual = samples
        .iter()
        .map(|s| {
            let grad = s.inverse_metric.matvec(&coefficients);
            let defect = linalg::add_scaled(&s.mean_curvature, &grad, 1.0);
            linalg::g_norm(&s.metric, &defect)
        })
        .collect();
    let mut potential = Expr::zero();
    for (a_idx, c) in coefficients.iter().enumerate() {
        potential = Expr::add(
            potential,
            Expr::mul(Expr::constant(*c), Expr::var(coord_names[a_idx], a_idx)),
        );
    }
    Ok(FitResult {
        coefficients,
        per_point_residual,
        degenerate_directions: degenerate,
        potential,
    })
}

/// Fits an affine potential to the scenario's mean curvature over its
/// sample points. No verdict is implied; pair with [`certify`].
pub fn fit_potential(scn: &MapScenario) -> Result<FitResult, ClairautError> {
    let mut samples = Vec::new();
    for p in &scn.sample_points {
        let split = scn.frame_split(p)?;
        let h = scn.mean_curvature(&split)?;
        let inverse_metric = scn.target.inverse_metric_at(&split.image)?;
        samples.push(FitSample {
            metric: split.g_target,
            inverse_metric,
            mean_curvature: h,
        });
    }
    let names = scn.target.coord_names();
    fit_affine_potential(&samples, &names)
}

/// Angle ψ ∈ [0, π/2] between a target vector and the perp space:
/// sin ψ is the range fraction of `w`.
pub fn curve_angle(split: &FrameSplit, w: &[f64]) -> Result<f64, ClairautError> {
    let norm = linalg::g_norm(&split.g_target, w);
    if norm < 1e-300 {
        return Err(ClairautError::ZeroVector);
    }
    let range_part = split.range_project(w);
    let fraction = (linalg::g_norm(&split.g_target, &range_part) / norm).clamp(0.0, 1.0);
    Ok(libm::asin(fraction))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    /// β = F∘α for a source geodesic α; ψ measured against the
    /// kernel/horizontal split of α̇.
    SourceGeodesic,
    /// β a target geodesic with tracked preimages; ψ measured against the
    /// range/perp split of β̇.
    TargetGeodesic,
}

#[derive(Debug, Clone, Copy)]
pub struct RelationSample {
    pub t: f64,
    pub angle: f64,
    /// e^{g(β(t))}·sin ψ(t).
    pub product: f64,
}

#[derive(Debug, Clone)]
pub struct RelationTrace {
    pub mode: TraceMode,
    pub rows: Vec<RelationSample>,
    /// (max − min) / max(|mean|, 1e−300) of the product.
    pub drift: f64,
    /// Worst preimage-tracking residual (target mode only).
    pub tracking_residual: f64,
}

fn drift_of(rows: &[RelationSample]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut mean = 0.0;
    for r in rows {
        lo = lo.min(r.product);
        hi = hi.max(r.product);
        mean += r.product;
    }
    mean /= rows.len() as f64;
    (hi - lo) / mean.abs().max(1e-300)
}

/// Traces e^{g∘F∘α}·sin ψ along the source geodesic from (p0, v0), with
/// sin ψ the kernel fraction of α̇.
pub fn relation_trace_source(
    scn: &MapScenario,
    g_expr: &Expr,
    p0: &[f64],
    v0: &[f64],
    steps: usize,
    h: f64,
    sample_every: usize,
) -> Result<RelationTrace, ClairautError> {
    let curve = geodesic_integrate(&scn.source, p0, v0, steps, h)
        .map_err(|f| ClairautError::GeodesicFailed(alloc::format!("{}", f.error)))?;
    let stride = sample_every.max(1);
    let mut rows = Vec::new();
    for s in curve.samples.iter().step_by(stride) {
        let split = scn.frame_split(&s.point)?;
        let speed = linalg::g_norm(&split.g_source, &s.velocity);
        if speed < 1e-300 {
            return Err(ClairautError::ZeroVector);
        }
        let vertical = split.kernel_project(&s.velocity);
        let fraction =
            (linalg::g_norm(&split.g_source, &vertical) / speed).clamp(0.0, 1.0);
        let angle = libm::asin(fraction);
        let g_val = g_expr.eval(&split.image)?;
        rows.push(RelationSample {
            t: s.t,
            angle,
            product: libm::exp(g_val) * fraction,
        });
    }
    let drift = drift_of(&rows);
    Ok(RelationTrace {
        mode: TraceMode::SourceGeodesic,
        rows,
        drift,
        tracking_residual: 0.0,
    })
}

/// Gauss–Newton step toward F(p) = q with minimal-norm updates (the
/// normal matrix is rank deficient whenever the map has a kernel).
fn gauss_newton_preimage(
    scn: &MapScenario,
    seed: &[f64],
    q: &[f64],
) -> Result<Vec<f64>, ClairautError> {
    let mut p = seed.to_vec();
    for _ in 0..25 {
        let fp = scn.map_at(&p)?;
        let r = linalg::sub(&fp, q);
        let jac = scn.jacobian_at(&p)?;
        let jt = jac.transpose();
        let jtj = jt.matmul(&jac);
        let jtr = jt.matvec(&r);
        let eig = linalg::jacobi_eigen(&jtj)?;
        let scale = eig.values[0].abs().max(1e-300);
        let mut delta = vec![0.0; p.len()];
        for (k, &val) in eig.values.iter().enumerate() {
            if val.abs() < 1e-12 * scale {
                continue;
            }
            let v = eig.vectors.col(k);
            let proj = linalg::dot(&v, &jtr) / val;
            delta = linalg::add_scaled(&delta, &v, -proj);
        }
        let step: f64 = libm::sqrt(linalg::dot(&delta, &delta));
        p = linalg::add_scaled(&p, &delta, 1.0);
        if step < 1e-12 {
            break;
        }
    }
    Ok(p)
}

/// Traces e^{g∘β}·sin ψ along the target geodesic from (F(p0), w0). A
/// seed velocity with no range component gives the identically-zero
/// product without tracking; otherwise every sampled β(t) is pulled back
/// through the map and the trace fails if the curve leaves the image.
pub fn relation_trace_target(
    scn: &MapScenario,
    g_expr: &Expr,
    p0: &[f64],
    w0: &[f64],
    steps: usize,
    h: f64,
    sample_every: usize,
) -> Result<RelationTrace, ClairautError> {
    let q0 = scn.map_at(p0)?;
    let split0 = scn.frame_split(p0)?;
    let norm = linalg::g_norm(&split0.g_target, w0);
    if norm < 1e-300 {
        return Err(ClairautError::ZeroVector);
    }
    let range_part = split0.range_project(w0);
    let range_norm = linalg::g_norm(&split0.g_target, &range_part);
    let beta = geodesic_integrate(&scn.target, &q0, w0, steps, h)
        .map_err(|f| ClairautError::GeodesicFailed(alloc::format!("{}", f.error)))?;
    let stride = sample_every.max(1);

    if range_norm < scn.tol.rank {
        // fully perp seed: sin ψ ≡ 0 and the product is identically zero
        let rows: Vec<RelationSample> = beta
            .samples
            .iter()
            .step_by(stride)
            .map(|s| RelationSample {
                t: s.t,
                angle: 0.0,
                product: 0.0,
            })
            .collect();
        return Ok(RelationTrace {
            mode: TraceMode::TargetGeodesic,
            rows,
            drift: 0.0,
            tracking_residual: 0.0,
        });
    }

    let mut rows = Vec::new();
    let mut p_prev = p0.to_vec();
    let mut worst_tracking = 0.0f64;
    let mut last_good_t = 0.0;
    for s in beta.samples.iter().step_by(stride) {
        let p_t = gauss_newton_preimage(scn, &p_prev, &s.point)?;
        let fp = scn.map_at(&p_t)?;
        let residual: f64 = libm::sqrt(linalg::dot(
            &linalg::sub(&fp, &s.point),
            &linalg::sub(&fp, &s.point),
        ));
        if residual > 1e-8 {
            return Err(ClairautError::CurveLeftImage { last_good_t });
        }
        worst_tracking = worst_tracking.max(residual);
        last_good_t = s.t;
        let split = scn.frame_split(&p_t)?;
        let angle = curve_angle(&split, &s.velocity)?;
        let g_val = g_expr.eval(&s.point)?;
        rows.push(RelationSample {
            t: s.t,
            angle,
            product: libm::exp(g_val) * libm::sin(angle),
        });
        p_prev = p_t;
    }
    let drift = drift_of(&rows);
    Ok(RelationTrace {
        mode: TraceMode::TargetGeodesic,
        rows,
        drift,
        tracking_residual: worst_tracking,
    })
}
