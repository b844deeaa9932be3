//! Small dense linear algebra. Chart dimensions are at most 16, so
//! everything here is O(n³) direct methods: Gauss–Jordan with partial
//! pivoting for inversion and solves, cyclic Jacobi rotations for symmetric
//! eigendecomposition, and modified Gram–Schmidt against an arbitrary SPD
//! inner product.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// Pivot magnitude fell below tolerance during elimination.
    Singular { pivot: f64 },
    /// Jacobi sweep limit exceeded before off-diagonals vanished.
    NoConvergence,
    Shape(String),
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::Singular { pivot } => {
                write!(f, "matrix is numerically singular (pivot {pivot:e})")
            }
            LinalgError::NoConvergence => write!(f, "Jacobi iteration did not converge"),
            LinalgError::Shape(msg) => write!(f, "shape mismatch: {msg}"),
        }
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Mat {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Mat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `A · v` for a plain coordinate vector.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest |a_ij − a_ji|.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Gauss–Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Mat, LinalgError> {
        let n = self.rows;
        if n != self.cols {
            return Err(LinalgError::Shape("inverse of non-square matrix".to_string()));
        }
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_val = a[(col, col)].abs();
            for r in (col + 1)..n {
                if a[(r, col)].abs() > pivot_val {
                    pivot_val = a[(r, col)].abs();
                    pivot_row = r;
                }
            }
            if pivot_val < 1e-300 {
                return Err(LinalgError::Singular { pivot: pivot_val });
            }
            if pivot_row != col {
                for j in 0..n {
                    a.data.swap(pivot_row * n + j, col * n + j);
                    inv.data.swap(pivot_row * n + j, col * n + j);
                }
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)];
                if factor == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[(r, j)] -= factor * a[(col, j)];
                    inv[(r, j)] -= factor * inv[(col, j)];
                }
            }
        }
        Ok(inv)
    }

    /// Solves `A x = b` through the explicit inverse. Fine at these sizes.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        Ok(self.inverse()?.matvec(b))
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Columns are the matching eigenvectors.
    pub vectors: Mat,
}

/// Cyclic Jacobi sweeps. The input must be symmetric; the off-diagonal
/// Frobenius mass shrinks quadratically, 30 sweeps is far more than n = 16
/// ever needs.
pub fn jacobi_eigen(m: &Mat) -> Result<SymEigen, LinalgError> {
    let n = m.rows();
    if n != m.cols() {
        return Err(LinalgError::Shape("eigen of non-square matrix".to_string()));
    }
    let mut a = m.clone();
    let mut v = Mat::identity(n);
    for _sweep in 0..30 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off < 1e-30 {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&x, &y| {
                a[(y, y)]
                    .partial_cmp(&a[(x, x)])
                    .unwrap_or(core::cmp::Ordering::Equal)
            });
            let values = order.iter().map(|&i| a[(i, i)]).collect();
            let mut vectors = Mat::zeros(n, n);
            for (new_col, &old_col) in order.iter().enumerate() {
                for r in 0..n {
                    vectors[(r, new_col)] = v[(r, old_col)];
                }
            }
            return Ok(SymEigen { values, vectors });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(LinalgError::NoConvergence)
}

/// Smallest eigenvalue of a symmetric matrix (SPD diagnostics).
pub fn smallest_eigenvalue(m: &Mat) -> Result<f64, LinalgError> {
    let eig = jacobi_eigen(m)?;
    Ok(*eig.values.last().expect("non-empty spectrum"))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `⟨u, v⟩_G = uᵀ G v`.
pub fn g_inner(g: &Mat, u: &[f64], v: &[f64]) -> f64 {
    dot(&g.matvec(v), u)
}

pub fn g_norm(g: &Mat, u: &[f64]) -> f64 {
    libm::sqrt(g_inner(g, u, u).max(0.0))
}

pub fn scale(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|x| x * s).collect()
}

pub fn add_scaled(u: &[f64], v: &[f64], s: f64) -> Vec<f64> {
    u.iter().zip(v).map(|(a, b)| a + s * b).collect()
}

pub fn sub(u: &[f64], v: &[f64]) -> Vec<f64> {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

/// Result of metric-weighted Gram–Schmidt.
#[derive(Debug, Clone)]
pub struct Orthonormalized {
    pub basis: Vec<Vec<f64>>,
    /// Input indices dropped because their post-projection norm fell
    /// below the rank tolerance. Rank deficiency is data, not failure.
    pub dropped: Vec<usize>,
}

/// Modified Gram–Schmidt with inner product `⟨u,v⟩ = uᵀ G v`.
pub fn gram_schmidt(g: &Mat, vectors: &[Vec<f64>], rank_tol: f64) -> Orthonormalized {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut dropped = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        // two projection passes for numerical orthogonality
        for _ in 0..2 {
            for b in &basis {
                let c = g_inner(g, &w, b);
                w = add_scaled(&w, b, -c);
            }
        }
        let norm = g_norm(g, &w);
        if norm < rank_tol {
            dropped.push(idx);
        } else {
            basis.push(scale(&w, 1.0 / norm));
        }
    }
    Orthonormalized { basis, dropped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn inverse_round_trips() {
        let m = Mat::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, -0.2],
            vec![0.5, -0.2, 2.0],
        ]);
        let inv = m.inverse().unwrap();
        let prod = m.matmul(&inv);
        let mut defect = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((prod[(i, j)] - expect).abs());
            }
        }
        assert!(defect < 1e-12, "defect {defect}");
    }

    #[test]
    fn singular_matrix_is_detected() {
        let m = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(m.inverse(), Err(LinalgError::Singular { .. })));
    }

    #[test]
    fn jacobi_recovers_known_spectrum() {
        // eigenvalues 3 and 1, eigenvectors (1,1)/√2 and (1,-1)/√2
        let m = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let eig = jacobi_eigen(&m).unwrap();
        assert!((eig.values[0] - 3.0).abs() < 1e-12);
        assert!((eig.values[1] - 1.0).abs() < 1e-12);
        let v0 = eig.vectors.col(0);
        assert!((v0[0].abs() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn jacobi_reconstructs_random_symmetric_matrices() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.gen_range(2..7);
            let mut m = Mat::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let v = rng.gen_range(-2.0..2.0);
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
            let eig = jacobi_eigen(&m).unwrap();
            // V L Vᵀ == M
            let mut l = Mat::zeros(n, n);
            for i in 0..n {
                l[(i, i)] = eig.values[i];
            }
            let rebuilt = eig.vectors.matmul(&l).matmul(&eig.vectors.transpose());
            for i in 0..n {
                for j in 0..n {
                    assert!((rebuilt[(i, j)] - m[(i, j)]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn gram_schmidt_keeps_standard_basis() {
        let g = Mat::identity(2);
        let out = gram_schmidt(&g, &[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-8);
        assert_eq!(out.basis, alloc::vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(out.dropped.is_empty());
    }

    #[test]
    fn gram_schmidt_orthonormalizes_skewed_pair() {
        let g = Mat::identity(2);
        let out = gram_schmidt(&g, &[vec![1.0, 0.0], vec![1.0, 1.0]], 1e-8);
        assert!((out.basis[1][0]).abs() < 1e-14);
        assert!((out.basis[1][1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gram_schmidt_drops_dependent_vector() {
        let g = Mat::identity(3);
        let out = gram_schmidt(
            &g,
            &[vec![1.0, 2.0, 0.0], vec![2.0, 4.0, 0.0]],
            1e-8,
        );
        assert_eq!(out.basis.len(), 1);
        assert_eq!(out.dropped, alloc::vec![1]);
    }

    #[test]
    fn gram_schmidt_respects_weighted_inner_product() {
        let g = Mat::from_rows(&[vec![1.0, 0.0], vec![0.0, 4.0]]);
        let out = gram_schmidt(&g, &[vec![0.0, 1.0], vec![1.0, 1.0]], 1e-8);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                let got = g_inner(&g, &out.basis[i], &out.basis[j]);
                assert!((got - expect).abs() < 1e-10);
            }
        }
    }
}
