//! Single-chart Riemannian manifolds. One global coordinate chart per
//! manifold; the metric is a symmetric matrix of expressions in the chart
//! coordinates. Christoffel symbols come from the standard formula
//! Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij}) with the metric
//! derivatives differentiated symbolically once at construction.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{EvalError, Expr};
use crate::linalg::{self, LinalgError, Mat};

pub use crate::linalg::{gram_schmidt, Orthonormalized};

#[derive(Debug, Clone, PartialEq)]
pub enum GeomError {
    Eval(EvalError),
    Linalg(LinalgError),
    /// Metric failed positive-definiteness; carries the smallest eigenvalue.
    NonSpd { smallest: f64 },
    NonFiniteState { step: usize },
    Dimension(String),
}

impl fmt::Display for GeomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeomError::Eval(e) => write!(f, "{e}"),
            GeomError::Linalg(e) => write!(f, "{e}"),
            GeomError::NonSpd { smallest } => {
                write!(f, "metric is not positive definite (smallest eigenvalue {smallest:e})")
            }
            GeomError::NonFiniteState { step } => {
                write!(f, "integration state became non-finite at step {step}")
            }
            GeomError::Dimension(msg) => write!(f, "dimension error: {msg}"),
        }
    }
}

impl From<EvalError> for GeomError {
    fn from(e: EvalError) -> Self {
        GeomError::Eval(e)
    }
}

impl From<LinalgError> for GeomError {
    fn from(e: LinalgError) -> Self {
        GeomError::Linalg(e)
    }
}

/// A manifold presented in one global chart.
#[derive(Debug, Clone)]
pub struct ManifoldChart {
    pub name: String,
    pub coords: Vec<String>,
    metric: Vec<Vec<Expr>>,
    /// metric_d[k][i][j] = ∂_k g_{ij}, differentiated once up front.
    metric_d: Vec<Vec<Vec<Expr>>>,
}

impl ManifoldChart {
    pub fn new(
        name: &str,
        coords: Vec<String>,
        metric: Vec<Vec<Expr>>,
    ) -> Result<ManifoldChart, GeomError> {
        let n = coords.len();
        if !(1..=16).contains(&n) {
            // n = 1 is allowed: submersion-style scenarios use line targets
            return Err(GeomError::Dimension(format!(
                "unsupported chart dimension {n} (expected 1..=16)"
            )));
        }
        if metric.len() != n || metric.iter().any(|row| row.len() != n) {
            return Err(GeomError::Dimension(
                "metric matrix must be n×n over the chart coordinates".to_string(),
            ));
        }
        let metric_d = (0..n)
            .map(|k| {
                metric
                    .iter()
                    .map(|row| row.iter().map(|e| e.derivative(k)).collect())
                    .collect()
            })
            .collect();
        Ok(ManifoldChart {
            name: name.to_string(),
            coords,
            metric,
            metric_d,
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord_names(&self) -> Vec<&str> {
        self.coords.iter().map(|s| s.as_str()).collect()
    }

    pub fn metric_exprs(&self) -> &[Vec<Expr>] {
        &self.metric
    }

    /// Metric matrix evaluated at `p`.
    pub fn metric_at(&self, p: &[f64]) -> Result<Mat, GeomError> {
        let n = self.dim();
        let mut g = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = self.metric[i][j].eval(p)?;
            }
        }
        Ok(g)
    }

    /// Inverse metric at `p`. A singular pivot triggers an SPD diagnostic
    /// that reports the smallest eigenvalue.
    pub fn inverse_metric_at(&self, p: &[f64]) -> Result<Mat, GeomError> {
        let g = self.metric_at(p)?;
        match g.inverse() {
            Ok(inv) => Ok(inv),
            Err(_) => {
                let smallest = linalg::smallest_eigenvalue(&g)?;
                Err(GeomError::NonSpd { smallest })
            }
        }
    }

    /// Verifies symmetry (tol 1e−12) and positive definiteness
    /// (eigenvalues > 1e−10) at `p`.
    pub fn validate_metric_at(&self, p: &[f64]) -> Result<(), GeomError> {
        let g = self.metric_at(p)?;
        let defect = g.symmetry_defect();
        if defect > 1e-12 {
            return Err(GeomError::Dimension(format!(
                "metric asymmetric at sample point (defect {defect:e})"
            )));
        }
        let smallest = linalg::smallest_eigenvalue(&g)?;
        if smallest <= 1e-10 {
            return Err(GeomError::NonSpd { smallest });
        }
        Ok(())
    }

    /// Christoffel symbols Γ^k_{ij} at `p`; `result[k][(i, j)]`.
    pub fn christoffel_at(&self, p: &[f64]) -> Result<Vec<Mat>, GeomError> {
        let n = self.dim();
        let ginv = self.inverse_metric_at(p)?;
        // dg[k][i][j] = ∂_k g_ij
        let mut dg = vec![Mat::zeros(n, n); n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    dg[k][(i, j)] = self.metric_d[k][i][j].eval(p)?;
                }
            }
        }
        let mut gamma = vec![Mat::zeros(n, n); n];
        for i in 0..n {
            for j in i..n {
                // first-kind symbol [ij, l]
                for k in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        let first = 0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                        s += ginv[(k, l)] * first;
                    }
                    gamma[k][(i, j)] = s;
                    gamma[k][(j, i)] = s;
                }
            }
        }
        Ok(gamma)
    }

    /// (∇_X Y)^k = X^i ∂_i Y^k + Γ^k_{ij} X^i Y^j at `p`, with `yfield`
    /// given as one expression per component.
    pub fn covariant_derivative_at(
        &self,
        p: &[f64],
        yfield: &[Expr],
        x: &[f64],
    ) -> Result<Vec<f64>, GeomError> {
        let n = self.dim();
        if yfield.len() != n || x.len() != n {
            return Err(GeomError::Dimension(
                "field and direction must match the chart dimension".to_string(),
            ));
        }
        let gamma = self.christoffel_at(p)?;
        let y: Vec<f64> = yfield
            .iter()
            .map(|e| e.eval(p))
            .collect::<Result<_, _>>()?;
        let mut out = vec![0.0; n];
        for k in 0..n {
            let mut v = 0.0;
            for i in 0..n {
                if x[i] == 0.0 {
                    continue;
                }
                v += x[i] * yfield[k].derivative(i).eval(p)?;
                for j in 0..n {
                    v += gamma[k][(i, j)] * x[i] * y[j];
                }
            }
            out[k] = v;
        }
        Ok(out)
    }

    /// Covariant derivative of a numerically sampled field along a curve
    /// through `p` with velocity `v`: D/dt Y^k = Ẏ^k + Γ^k_{ij} v^i Y^j,
    /// with Ẏ supplied by the caller (typically a central difference).
    pub fn covariant_from_samples(
        &self,
        p: &[f64],
        v: &[f64],
        y: &[f64],
        ydot: &[f64],
    ) -> Result<Vec<f64>, GeomError> {
        let n = self.dim();
        let gamma = self.christoffel_at(p)?;
        let mut out = vec![0.0; n];
        for k in 0..n {
            let mut acc = ydot[k];
            for i in 0..n {
                for j in 0..n {
                    acc += gamma[k][(i, j)] * v[i] * y[j];
                }
            }
            out[k] = acc;
        }
        Ok(out)
    }

    pub fn inner_at(&self, p: &[f64], u: &[f64], v: &[f64]) -> Result<f64, GeomError> {
        let g = self.metric_at(p)?;
        Ok(linalg::g_inner(&g, u, v))
    }

    pub fn norm_at(&self, p: &[f64], u: &[f64]) -> Result<f64, GeomError> {
        let g = self.metric_at(p)?;
        Ok(linalg::g_norm(&g, u))
    }
}

/// Geodesic trace with uniformly spaced samples.
#[derive(Debug, Clone)]
pub struct Curve {
    pub h: f64,
    pub samples: Vec<CurveSample>,
}

#[derive(Debug, Clone)]
pub struct CurveSample {
    pub t: f64,
    pub point: Vec<f64>,
    pub velocity: Vec<f64>,
}

impl Curve {
    pub fn last(&self) -> &CurveSample {
        self.samples.last().expect("curve has at least the seed sample")
    }
}

#[derive(Debug)]
pub struct GeodesicFailure {
    pub partial: Curve,
    pub error: GeomError,
}

/// Classical fixed-step RK4 on the first-order system
/// ẋ = v, v̇^k = −Γ^k_{ij} v^i v^j.
pub fn geodesic_integrate(
    chart: &ManifoldChart,
    p0: &[f64],
    v0: &[f64],
    steps: usize,
    h: f64,
) -> Result<Curve, GeodesicFailure> {
    let n = chart.dim();
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(CurveSample {
        t: 0.0,
        point: p0.to_vec(),
        velocity: v0.to_vec(),
    });
    let mut x = p0.to_vec();
    let mut v = v0.to_vec();

    let accel = |x: &[f64], v: &[f64]| -> Result<Vec<f64>, GeomError> {
        let gamma = chart.christoffel_at(x)?;
        let mut a = vec![0.0; n];
        for k in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                if v[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    s += gamma[k][(i, j)] * v[i] * v[j];
                }
            }
            a[k] = -s;
        }
        Ok(a)
    };

    for step in 0..steps {
        let stage = |x: &[f64], v: &[f64]| -> Result<(Vec<f64>, Vec<f64>), GeomError> {
            Ok((v.to_vec(), accel(x, v)?))
        };
        let result = (|| -> Result<(Vec<f64>, Vec<f64>), GeomError> {
            let (k1x, k1v) = stage(&x, &v)?;
            let (k2x, k2v) = stage(
                &linalg::add_scaled(&x, &k1x, h / 2.0),
                &linalg::add_scaled(&v, &k1v, h / 2.0),
            )?;
            let (k3x, k3v) = stage(
                &linalg::add_scaled(&x, &k2x, h / 2.0),
                &linalg::add_scaled(&v, &k2v, h / 2.0),
            )?;
            let (k4x, k4v) = stage(
                &linalg::add_scaled(&x, &k3x, h),
                &linalg::add_scaled(&v, &k3v, h),
            )?;
            let mut nx = x.clone();
            let mut nv = v.clone();
            for i in 0..n {
                nx[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
                nv[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
            }
            Ok((nx, nv))
        })();
        match result {
            Ok((nx, nv)) => {
                if nx.iter().chain(nv.iter()).any(|c| !c.is_finite()) {
                    return Err(GeodesicFailure {
                        partial: Curve { h, samples },
                        error: GeomError::NonFiniteState { step },
                    });
                }
                x = nx;
                v = nv;
                samples.push(CurveSample {
                    t: (step + 1) as f64 * h,
                    point: x.clone(),
                    velocity: v.clone(),
                });
            }
            Err(error) => {
                return Err(GeodesicFailure {
                    partial: Curve { h, samples },
                    error,
                });
            }
        }
    }
    Ok(Curve { h, samples })
}

/// Relative drift of g(ẋ, ẋ) along the curve against its initial value.
pub fn speed_drift(chart: &ManifoldChart, curve: &Curve) -> Result<f64, GeomError> {
    let first = &curve.samples[0];
    let e0 = chart.inner_at(&first.point, &first.velocity, &first.velocity)?;
    let mut worst = 0.0f64;
    for s in &curve.samples {
        let e = chart.inner_at(&s.point, &s.velocity, &s.velocity)?;
        worst = worst.max((e - e0).abs());
    }
    Ok(worst / e0.abs().max(1e-300))
}
