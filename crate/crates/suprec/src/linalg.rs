//! Small dense linear algebra: exactly the kernels the estimators need.
//!
//! The matrices here are tiny by numerical-linear-algebra standards (a few
//! hundred rows, a few dozen columns), factored millions of times inside
//! Monte Carlo loops. The two kernels are
//!
//! * a Householder QR with column pivoting that returns the squared residual
//!   of a vector outside a column space — used to score candidate supports —
//!   and degrades gracefully to the numerically determined rank when columns
//!   are dependent, and
//! * a Cholesky factorization exposing the log-determinant and the quadratic
//!   form `‖L⁻¹y‖²` — the two ingredients of a Gaussian log-density.
//!
//! Both operate on a simple row-major [`Matrix`]; no BLAS is involved, and
//! none is needed at these sizes.

use thiserror::Error;

/// Errors from factorization routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    /// Cholesky hit a nonpositive pivot: the matrix is not positive definite.
    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: String },
    /// Operand shapes do not line up.
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
}

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix entrywise from `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Wraps an existing row-major buffer.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "buffer length must equal rows·cols");
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major backing slice.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// Row `i` as a slice.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `A·x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "mul_vec: length mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `Aᵀ·y`.
    pub fn transpose_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows, "transpose_mul_vec: length mismatch");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let yi = y[i];
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        out
    }

    /// Copies the listed columns into a new `rows × indices.len()` matrix.
    pub fn gather_columns(&self, indices: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, indices.len(), |i, j| self.get(i, indices[j]))
    }

    /// `scale·A·Aᵀ + ridge·I`, an `rows × rows` symmetric matrix.
    pub fn scaled_gram_aat(&self, scale: f64, ridge: f64) -> Matrix {
        let mut out = Matrix::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in 0..=i {
                let dot: f64 = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(&a, &b)| a * b)
                    .sum();
                let v = scale * dot + if i == j { ridge } else { 0.0 };
                out.set(i, j, v);
                out.set(j, i, v);
            }
        }
        out
    }
}

/// Squared distance from `y` to the column space of `basis`:
/// `‖y − Π_{range(basis)} y‖²`, together with the numerical rank used.
///
/// Householder QR with column pivoting; the same reflections that triangulate
/// the basis are applied to `y`, after which the residual is the energy of
/// `y` beyond the first `rank` rotated coordinates. A pivot column whose
/// remaining norm falls below `rows·ε` times the largest pivot is treated as
/// dependent and excluded, so rank-deficient bases project onto their actual
/// numerical column space rather than poisoning the result.
///
/// # Panics
///
/// If `y.len() != basis.rows()` or the basis is wider than it is tall.
pub fn projection_residual_sq(basis: &Matrix, y: &[f64]) -> (f64, usize) {
    let (m, k) = (basis.rows(), basis.cols());
    assert_eq!(y.len(), m, "projection_residual_sq: vector length mismatch");
    assert!(k <= m, "projection_residual_sq: basis wider than tall");
    if k == 0 {
        return (y.iter().map(|v| v * v).sum(), 0);
    }
    let mut b = basis.clone();
    let mut w = y.to_vec();
    let mut rank = 0usize;
    let mut first_pivot = 0.0f64;
    for j in 0..k {
        // Column pivot: recompute remaining norms exactly (k is small; this
        // avoids the classical norm-downdating instability).
        let (pivot_col, pivot_norm_sq) = (j..k)
            .map(|c| (c, (j..m).map(|i| b.get(i, c).powi(2)).sum::<f64>()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty column range");
        let pivot_norm = pivot_norm_sq.sqrt();
        if j == 0 {
            first_pivot = pivot_norm;
        }
        if pivot_norm <= first_pivot * m as f64 * f64::EPSILON {
            break; // remaining columns are numerically dependent
        }
        if pivot_col != j {
            for i in 0..m {
                let tmp = b.get(i, j);
                b.set(i, j, b.get(i, pivot_col));
                b.set(i, pivot_col, tmp);
            }
        }
        // Householder vector v = x + sign(x₀)·‖x‖·e₁ over rows j..m.
        let x0 = b.get(j, j);
        let alpha = -x0.signum() * pivot_norm;
        let mut v: Vec<f64> = (j..m).map(|i| b.get(i, j)).collect();
        v[0] -= alpha;
        let v_norm_sq: f64 = v.iter().map(|t| t * t).sum();
        if v_norm_sq > 0.0 {
            // Apply I − 2vvᵀ/‖v‖² to the trailing columns and to y.
            for c in j..k {
                let dot: f64 = v.iter().enumerate().map(|(r, &vr)| vr * b.get(j + r, c)).sum();
                let coef = 2.0 * dot / v_norm_sq;
                for (r, &vr) in v.iter().enumerate() {
                    let cur = b.get(j + r, c);
                    b.set(j + r, c, cur - coef * vr);
                }
            }
            let dot: f64 = v.iter().enumerate().map(|(r, &vr)| vr * w[j + r]).sum();
            let coef = 2.0 * dot / v_norm_sq;
            for (r, &vr) in v.iter().enumerate() {
                w[j + r] -= coef * vr;
            }
        }
        rank = j + 1;
    }
    let residual = w[rank..].iter().map(|v| v * v).sum::<f64>();
    (residual, rank)
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    /// Row-major lower triangle (upper part left zero).
    factor: Vec<f64>,
}

impl Cholesky {
    /// Factors `mat = L·Lᵀ`.
    ///
    /// # Errors
    ///
    /// [`LinalgError::DimensionMismatch`] on a non-square input;
    /// [`LinalgError::NotPositiveDefinite`] when a pivot is nonpositive or
    /// NaN. Only the lower triangle of the input is read.
    pub fn new(mat: &Matrix) -> Result<Self, LinalgError> {
        if mat.rows() != mat.cols() {
            return Err(LinalgError::DimensionMismatch {
                context: format!("Cholesky of a {}×{} matrix", mat.rows(), mat.cols()),
            });
        }
        let n = mat.rows();
        let mut l = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = mat.get(i, j);
                for p in 0..j {
                    sum -= l[i * n + p] * l[j * n + p];
                }
                if i == j {
                    if !(sum > 0.0) {
                        return Err(LinalgError::NotPositiveDefinite {
                            index: i,
                            pivot: format!("{sum}"),
                        });
                    }
                    l[i * n + j] = sum.sqrt();
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Ok(Cholesky { n, factor: l })
    }

    /// `ln det(L·Lᵀ) = 2 Σ ln Lᵢᵢ`; computed in log space, so determinants far
    /// outside f64 range are still represented exactly as log-values.
    pub fn ln_det(&self) -> f64 {
        (0..self.n)
            .map(|i| self.factor[i * self.n + i].ln())
            .sum::<f64>()
            * 2.0
    }

    /// `‖L⁻¹y‖² = yᵀ(L·Lᵀ)⁻¹y` by one forward substitution.
    ///
    /// # Panics
    ///
    /// If `y.len()` differs from the matrix dimension.
    pub fn quadratic_form(&self, y: &[f64]) -> f64 {
        assert_eq!(y.len(), self.n, "quadratic_form: length mismatch");
        let mut z = y.to_vec();
        for i in 0..self.n {
            let mut v = z[i];
            for p in 0..i {
                v -= self.factor[i * self.n + p] * z[p];
            }
            z[i] = v / self.factor[i * self.n + i];
        }
        z.iter().map(|v| v * v).sum()
    }
}
