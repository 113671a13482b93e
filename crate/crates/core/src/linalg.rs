//! Small dense complex linear algebra: Hermitian Cholesky, pivoted LDLᴴ for
//! diagnosis, and LU with partial pivoting.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        CMatrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(<[_]>::to_vec).collect()
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn conj_transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |m_ij - conj(m_ji)|`.
    pub fn hermitian_residual(&self) -> f64 {
        assert!(self.is_square());
        let mut r: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }

    /// `(m + mᴴ) / 2`, exactly Hermitian with a real diagonal.
    pub fn hermitize(&self) -> CMatrix {
        assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] = Complex64::new(self[(i, i)].re, 0.0);
            for j in i + 1..self.cols {
                let v = 0.5 * (self[(i, j)] + self[(j, i)].conj());
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// `A = L Lᴴ` for Hermitian positive definite `A`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: CMatrix,
    condition: f64,
}

impl Cholesky {
    /// Factors the Hermitian part of `a` (only the lower triangle is read).
    /// Fails with `IllConditioned` if `a` is not numerically positive
    /// definite or the condition estimate exceeds `max_condition`.
    pub fn new(a: &CMatrix, max_condition: f64) -> Result<Cholesky> {
        assert!(a.is_square());
        let n = a.nrows();
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(not_positive_definite(a, j));
            }
            let djj = d.sqrt();
            l[(j, j)] = Complex64::new(djj, 0.0);
            for i in j + 1..n {
                let mut v = a[(i, j)];
                for k in 0..j {
                    v -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = v / djj;
            }
        }
        let diag: Vec<f64> = (0..n).map(|i| l[(i, i)].re).collect();
        let hi = diag.iter().cloned().fold(0.0, f64::max);
        let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let condition = if n == 0 { 1.0 } else { (hi / lo).powi(2) };
        if condition > max_condition {
            return Err(Error::IllConditioned {
                condition,
                reason: format!("Gram matrix condition exceeds {max_condition:e}"),
            });
        }
        Ok(Cholesky { l, condition })
    }

    pub fn lower(&self) -> &CMatrix {
        &self.l
    }

    /// `(max L_ii / min L_ii)^2`, a cheap lower bound for the 2-norm
    /// condition number.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `L⁻¹ b`.
    pub fn forward(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.l.nrows();
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut v = y[i];
            for k in 0..i {
                v -= self.l[(i, k)] * y[k];
            }
            y[i] = v / self.l[(i, i)];
        }
        y
    }

    /// `A⁻¹ b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.l.nrows();
        let mut x = self.forward(b);
        for i in (0..n).rev() {
            let mut v = x[i];
            for k in i + 1..n {
                v -= self.l[(k, i)].conj() * x[k];
            }
            x[i] = v / self.l[(i, i)];
        }
        x
    }
}

/// Symmetric diagonal pivoting `P A Pᴴ = L D Lᴴ`, used to describe why a
/// Cholesky factorization failed. Returns the pivots `D` in elimination
/// order.
pub fn ldlh_pivots(a: &CMatrix) -> Vec<f64> {
    let n = a.nrows();
    let mut m = a.hermitize();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::with_capacity(n);
    for j in 0..n {
        let p = (j..n)
            .max_by(|&x, &y| m[(perm[x], perm[x])].re.abs().total_cmp(&m[(perm[y], perm[y])].re.abs()))
            .expect("non-empty range");
        perm.swap(j, p);
        let pj = perm[j];
        let d = m[(pj, pj)].re;
        pivots.push(d);
        if d == 0.0 {
            continue;
        }
        for &pi in &perm[j + 1..] {
            let lij = m[(pi, pj)] / d;
            for &pk in &perm[j + 1..] {
                let upd = lij * m[(pj, pk)];
                m[(pi, pk)] -= upd;
            }
        }
    }
    pivots
}

fn not_positive_definite(a: &CMatrix, at: usize) -> Error {
    let pivots = ldlh_pivots(a);
    let negative = pivots.iter().filter(|&&d| d <= 0.0).count();
    let hi = pivots.iter().map(|d| d.abs()).fold(0.0, f64::max);
    let lo = pivots.iter().map(|d| d.abs()).fold(f64::INFINITY, f64::min);
    Error::IllConditioned {
        condition: if lo > 0.0 { hi / lo } else { f64::INFINITY },
        reason: format!(
            "matrix is not positive definite (Cholesky breakdown at column {at}, \
             {negative} non-positive LDLᴴ pivot(s))"
        ),
    }
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &CMatrix) -> Result<Lu> {
        assert!(a.is_square());
        let n = a.nrows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        for j in 0..n {
            let p = (j..n)
                .max_by(|&x, &y| lu[(x, j)].norm().total_cmp(&lu[(y, j)].norm()))
                .expect("non-empty range");
            if !(lu[(p, j)].norm() > f64::EPSILON * scale * n as f64) {
                return Err(Error::IllConditioned {
                    condition: f64::INFINITY,
                    reason: format!("singular matrix (zero pivot in column {j})"),
                });
            }
            if p != j {
                for k in 0..n {
                    let t = lu[(j, k)];
                    lu[(j, k)] = lu[(p, k)];
                    lu[(p, k)] = t;
                }
                perm.swap(j, p);
            }
            let d = lu[(j, j)];
            for i in j + 1..n {
                let f = lu[(i, j)] / d;
                lu[(i, j)] = f;
                for k in j + 1..n {
                    let upd = f * lu[(j, k)];
                    lu[(i, k)] -= upd;
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.nrows();
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let v = self.lu[(i, k)] * x[k];
                x[i] -= v;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let v = self.lu[(i, k)] * x[k];
                x[i] -= v;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    /// `A⁻¹ B`, column by column.
    pub fn solve_matrix(&self, b: &CMatrix) -> CMatrix {
        let n = self.lu.nrows();
        assert_eq!(b.nrows(), n);
        let mut out = CMatrix::zeros(n, b.ncols());
        for j in 0..b.ncols() {
            let col: Vec<Complex64> = (0..n).map(|i| b[(i, j)]).collect();
            for (i, v) in self.solve(&col).into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }
}
