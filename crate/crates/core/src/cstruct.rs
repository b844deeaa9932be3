//! Almost complex structures on the target chart: the J² = −I residual,
//! Hermitian compatibility of J with the metric, and the parallel-J
//! (Kähler) residual built from target Christoffel symbols. All checks are
//! pointwise; no global claim is made.

use alloc::vec::Vec;
use core::fmt;

use crate::expr::{EvalError, Expr};
use crate::geom::{GeomError, ManifoldChart};
use crate::linalg::{g_norm, Mat};

/// Components J^a_b as expressions in the target coordinates; column `b`
/// is the image of the coordinate frame vector ∂y_b.
#[derive(Debug, Clone)]
pub struct ComplexStructure {
    entries: Vec<Vec<Expr>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CStructError {
    OddDimension(usize),
    Shape,
    Geom(GeomError),
}

impl fmt::Display for CStructError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CStructError::OddDimension(n) => {
                write!(f, "complex structure needs an even dimension, got {n}")
            }
            CStructError::Shape => write!(f, "complex structure matrix must be n×n"),
            CStructError::Geom(e) => write!(f, "{e}"),
        }
    }
}

impl From<GeomError> for CStructError {
    fn from(e: GeomError) -> Self {
        CStructError::Geom(e)
    }
}

impl From<EvalError> for CStructError {
    fn from(e: EvalError) -> Self {
        CStructError::Geom(GeomError::Eval(e))
    }
}

impl ComplexStructure {
    pub fn new(entries: Vec<Vec<Expr>>) -> Result<ComplexStructure, CStructError> {
        let n = entries.len();
        if n % 2 != 0 {
            return Err(CStructError::OddDimension(n));
        }
        if entries.iter().any(|row| row.len() != n) {
            return Err(CStructError::Shape);
        }
        Ok(ComplexStructure { entries })
    }

    /// The constant block structure J∂y₁ = ∂y₂, J∂y₂ = −∂y₁, … on 2k
    /// coordinates.
    pub fn block_rotation(pairs: usize) -> ComplexStructure {
        let n = 2 * pairs;
        let mut entries = Vec::new();
        for a in 0..n {
            let mut row = Vec::new();
            for b in 0..n {
                let v = if a == b + 1 && b % 2 == 0 {
                    1.0
                } else if a + 1 == b && b % 2 == 1 {
                    -1.0
                } else {
                    0.0
                };
                row.push(Expr::constant(v));
            }
            entries.push(row);
        }
        ComplexStructure { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<Expr>] {
        &self.entries
    }

    /// J evaluated at a target point.
    pub fn j_at(&self, q: &[f64]) -> Result<Mat, CStructError> {
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                m[(a, b)] = self.entries[a][b].eval(q)?;
            }
        }
        Ok(m)
    }

    /// Column `b` of J as an expression field (the image of ∂y_b).
    fn column_field(&self, b: usize) -> Vec<Expr> {
        self.entries.iter().map(|row| row[b].clone()).collect()
    }
}

/// Max-norm of J(q)² + I.
pub fn check_j_square(j: &ComplexStructure, q: &[f64]) -> Result<f64, CStructError> {
    let jm = j.j_at(q)?;
    let n = jm.rows();
    let sq = jm.matmul(&jm);
    let mut worst = 0.0f64;
    for i in 0..n {
        for k in 0..n {
            let expect = if i == k { -1.0 } else { 0.0 };
            worst = worst.max((sq[(i, k)] - expect).abs());
        }
    }
    Ok(worst)
}

/// Max over coordinate-frame pairs of |g(J e_a, J e_b) − g(e_a, e_b)|,
/// i.e. the max-norm of Jᵀ G J − G.
pub fn check_hermitian(
    j: &ComplexStructure,
    chart: &ManifoldChart,
    q: &[f64],
) -> Result<f64, CStructError> {
    let jm = j.j_at(q)?;
    let g = chart.metric_at(q)?;
    let test = jm.transpose().matmul(&g).matmul(&jm);
    let n = g.rows();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            worst = worst.max((test[(a, b)] - g[(a, b)]).abs());
        }
    }
    Ok(worst)
}

/// Max over coordinate directions of ‖∇_{e_c}(J e_b) − J(∇_{e_c} e_b)‖,
/// the pointwise failure of ∇J = 0.
pub fn check_kahler(
    j: &ComplexStructure,
    chart: &ManifoldChart,
    q: &[f64],
) -> Result<f64, CStructError> {
    let n = chart.dim();
    if j.dim() != n {
        return Err(CStructError::Shape);
    }
    let jm = j.j_at(q)?;
    let g = chart.metric_at(q)?;
    let gamma = chart.christoffel_at(q)?;
    let mut worst = 0.0f64;
    for c in 0..n {
        let mut e_c = alloc::vec![0.0; n];
        e_c[c] = 1.0;
        for b in 0..n {
            let jcol = j.column_field(b);
            let lhs = chart.covariant_derivative_at(q, &jcol, &e_c)?;
            // ∇_{e_c} e_b = Γ^a_{cb} ∂y_a
            let gamma_col: Vec<f64> = (0..n).map(|a| gamma[a][(c, b)]).collect();
            let rhs = jm.matvec(&gamma_col);
            let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(x, y)| x - y).collect();
            worst = worst.max(g_norm(&g, &diff));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use alloc::string::{String, ToString};
    use alloc::vec;
    use rand::Rng;
    use rand::SeedableRng;

    fn target_chart(factor_coord: &str) -> ManifoldChart {
        let names = ["y1", "y2", "y3", "y4", "y5", "y6"];
        let factor = alloc::format!("exp(2*{factor_coord})");
        let mut metric = Vec::new();
        for i in 0..6 {
            let mut row = Vec::new();
            for j in 0..6 {
                let e = if i != j {
                    Expr::constant(0.0)
                } else if i == 2 || i == 3 {
                    parse(&factor, &names).unwrap()
                } else {
                    Expr::constant(1.0)
                };
                row.push(e);
            }
            metric.push(row);
        }
        ManifoldChart::new(
            "target",
            names.iter().map(|s| s.to_string()).collect(),
            metric,
        )
        .unwrap()
    }

    #[test]
    fn block_rotation_squares_to_minus_identity() {
        let j = ComplexStructure::block_rotation(3);
        let q = [0.4, -0.2, 0.9, 0.1, -0.5, 0.3];
        assert_eq!(check_j_square(&j, &q).unwrap(), 0.0);
    }

    #[test]
    fn identity_matrix_fails_j_square_by_two() {
        let entries: Vec<Vec<Expr>> = (0..2)
            .map(|a| {
                (0..2)
                    .map(|b| Expr::constant(if a == b { 1.0 } else { 0.0 }))
                    .collect()
            })
            .collect();
        let j = ComplexStructure::new(entries).unwrap();
        assert_eq!(check_j_square(&j, &[0.0, 0.0]).unwrap(), 2.0);
    }

    #[test]
    fn conjugated_structure_still_squares_to_minus_identity() {
        // S · J₀ · S⁻¹ keeps J² = −I for any invertible S
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 4;
        let j0 = {
            let mut m = Mat::zeros(n, n);
            m[(1, 0)] = 1.0;
            m[(0, 1)] = -1.0;
            m[(3, 2)] = 1.0;
            m[(2, 3)] = -1.0;
            m
        };
        for _ in 0..5 {
            let mut s = Mat::zeros(n, n);
            for i in 0..n {
                for k in 0..n {
                    s[(i, k)] = rng.gen_range(-1.0..1.0) + if i == k { 2.0 } else { 0.0 };
                }
            }
            let sinv = s.inverse().unwrap();
            let conj = s.matmul(&j0).matmul(&sinv);
            let entries: Vec<Vec<Expr>> = (0..n)
                .map(|a| (0..n).map(|b| Expr::constant(conj[(a, b)])).collect())
                .collect();
            let j = ComplexStructure::new(entries).unwrap();
            let res = check_j_square(&j, &[0.0; 4]).unwrap();
            assert!(res < 1e-10, "residual {res}");
        }
    }

    #[test]
    fn paper_block_j_is_hermitian_for_conformal_metric() {
        let j = ComplexStructure::block_rotation(3);
        let chart = target_chart("y3");
        let q = [0.3, -0.4, 0.8, -0.1, 0.6, 0.2];
        // J pairs y3 ↔ y4 which carry equal conformal factors
        assert!(check_hermitian(&j, &chart, &q).unwrap() < 1e-12);
    }

    #[test]
    fn axis_swap_on_anisotropic_metric_breaks_hermitian() {
        let names = ["y1", "y2"];
        let metric = vec![
            vec![Expr::constant(1.0), Expr::constant(0.0)],
            vec![Expr::constant(0.0), Expr::constant(4.0)],
        ];
        let chart = ManifoldChart::new(
            "aniso",
            names.iter().map(|s| String::from(*s)).collect(),
            metric,
        )
        .unwrap();
        let j = ComplexStructure::block_rotation(1);
        let res = check_hermitian(&j, &chart, &[0.0, 0.0]).unwrap();
        assert_eq!(res, 3.0);
    }

    #[test]
    fn flat_metric_with_constant_j_is_kahler() {
        let names = ["y1", "y2", "y3", "y4"];
        let metric: Vec<Vec<Expr>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|k| Expr::constant(if i == k { 1.0 } else { 0.0 }))
                    .collect()
            })
            .collect();
        let chart = ManifoldChart::new(
            "flat",
            names.iter().map(|s| String::from(*s)).collect(),
            metric,
        )
        .unwrap();
        let j = ComplexStructure::block_rotation(2);
        assert!(check_kahler(&j, &chart, &[0.1, 0.2, 0.3, 0.4]).unwrap() < 1e-15);
    }

    #[test]
    fn conformal_pair_block_is_kahler_for_both_fixture_targets() {
        let j = ComplexStructure::block_rotation(3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for factor in ["y3", "y4"] {
            let chart = target_chart(factor);
            for _ in 0..5 {
                let q: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let res = check_kahler(&j, &chart, &q).unwrap();
                assert!(res < 1e-8, "factor {factor}: residual {res}");
            }
        }
    }

    #[test]
    fn kahler_residual_detects_incompatible_metric() {
        // e^{2y3} on dy3² only: J maps ∂y3 to ∂y4 across unequal factors
        let names = ["y3", "y4"];
        let metric = vec![
            vec![parse("exp(2*y3)", &names).unwrap(), Expr::constant(0.0)],
            vec![Expr::constant(0.0), Expr::constant(1.0)],
        ];
        let chart = ManifoldChart::new(
            "skew",
            names.iter().map(|s| String::from(*s)).collect(),
            metric,
        )
        .unwrap();
        let j = ComplexStructure::block_rotation(1);
        let res = check_kahler(&j, &chart, &[0.3, 0.1]).unwrap();
        assert!(res > 1e-2, "residual {res}");
    }
}
