//! Dense complex Hermitian linear algebra for small matrices.
//!
//! Everything downstream reduces to questions about Hermitian matrices of
//! dimension at most a dozen or so: is it positive semidefinite, what is its
//! numeric rank, what is a Gram factor. The eigensolver is a cyclic complex
//! Jacobi iteration, which is accurate to working precision at this scale.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Result};

pub type C64 = Complex64;

/// Tolerances shared by every PSD, rank and boundary decision.
///
/// All thresholds are relative to `max(1, max_abs_entry)` of the matrix under test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    pub psd_tol: f64,
    pub rank_tol: f64,
    pub boundary_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            psd_tol: 1e-10,
            rank_tol: 1e-8,
            boundary_tol: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("psd_tol", self.psd_tol),
            ("rank_tol", self.rank_tol),
            ("boundary_tol", self.boundary_tol),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return invalid(format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        Ok(())
    }
}

/// A general dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid("matrix dimensions must be positive");
        }
        if data.len() != rows * cols {
            return invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            ));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("matrix has non-finite entries");
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

/// A Hermitian matrix. Construction stores `(A + A*)/2`, so the stored
/// entries are exactly conjugate-symmetric with a real diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl HermitianMatrix {
    /// Builds from row-major entries, symmetrizing.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        let m = ComplexMatrix::from_row_major(dim, dim, data)?;
        Ok(Self::symmetrize(&m))
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self::from_row_major(dim, data)
    }

    /// Hermitian part of a square matrix.
    pub fn symmetrize(m: &ComplexMatrix) -> Self {
        assert_eq!(m.rows, m.cols, "Hermitian matrices are square");
        let n = m.rows;
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = C64::new(m.get(i, i).re, 0.0);
            for j in (i + 1)..n {
                let v = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
                data[i * n + j] = v;
                data[j * n + i] = v.conj();
            }
        }
        HermitianMatrix { dim: n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::symmetrize(&ComplexMatrix::identity(n))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::from_fn(n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `max(1, max_abs_entry)`, the scale all tolerances are measured against.
    pub fn tolerance_scale(&self) -> f64 {
        self.max_abs().max(1.0)
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.dim,
            cols: self.dim,
            data: self.data.clone(),
        }
    }

    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        self.to_complex().max_abs_diff(&other.to_complex())
    }

    /// Principal submatrix on `indices` (0-based, in the given order).
    pub fn principal_submatrix(&self, indices: &[usize]) -> HermitianMatrix {
        let k = indices.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in indices {
            for &j in indices {
                data.push(self.get(i, j));
            }
        }
        HermitianMatrix { dim: k, data }
    }

    /// Entrywise (Schur) product with another Hermitian matrix.
    pub fn hadamard(&self, other: &HermitianMatrix) -> HermitianMatrix {
        assert_eq!(self.dim, other.dim);
        HermitianMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect(),
        }
    }

    /// `D A D*` for `D = diag(d)`.
    pub fn congruence_diag(&self, d: &[C64]) -> HermitianMatrix {
        assert_eq!(self.dim, d.len());
        let n = self.dim;
        let m = ComplexMatrix {
            rows: n,
            cols: n,
            data: (0..n * n)
                .map(|k| d[k / n] * self.data[k] * d[k % n].conj())
                .collect(),
        };
        Self::symmetrize(&m)
    }

    pub fn add(&self, other: &HermitianMatrix) -> HermitianMatrix {
        assert_eq!(self.dim, other.dim);
        HermitianMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &HermitianMatrix) -> HermitianMatrix {
        assert_eq!(self.dim, other.dim);
        HermitianMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> HermitianMatrix {
        HermitianMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// `x* A x`, real for Hermitian `A`.
    pub fn quadratic_form(&self, x: &[C64]) -> f64 {
        let n = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += x[i].conj() * self.data[i * n + j] * x[j];
            }
        }
        acc.re
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }
}

/// Spectrum (ascending) and orthonormal eigenvectors as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenResult {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("nonempty spectrum")
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V diag(values) V*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for i in 0..n {
            for k in 0..n {
                let v = scaled.get(i, k) * self.values[k];
                scaled.set(i, k, v);
            }
        }
        scaled.matmul(&self.vectors.adjoint())
    }
}

const MAX_SWEEPS: usize = 100;

/// Full eigendecomposition by cyclic complex Jacobi rotations.
pub fn hermitian_eigen(a: &HermitianMatrix) -> Result<EigenResult> {
    if a.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return invalid("matrix has non-finite entries");
    }
    let n = a.dim;
    let mut m = a.to_complex();
    let mut v = ComplexMatrix::identity(n);
    let total: f64 = m.data.iter().map(|z| z.norm_sqr()).sum();
    let threshold = (f64::EPSILON * f64::EPSILON) * total.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j).norm_sqr())
            .sum();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                // Phase that makes the (p,q) entry real and positive.
                let phase = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // U acts on coordinates p, q: [[c, s], [-s e^{-i phi}, c e^{-i phi}]].
                let u_pp = C64::new(c, 0.0);
                let u_pq = C64::new(s, 0.0);
                let u_qp = -phase.conj() * s;
                let u_qq = phase.conj() * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, mkp * u_pp + mkq * u_qp);
                    m.set(k, q, mkp * u_pq + mkq * u_qq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, u_pp.conj() * mpk + u_qp.conj() * mqk);
                    m.set(q, k, u_pq.conj() * mpk + u_qq.conj() * mqk);
                }
                m.set(p, q, C64::new(0.0, 0.0));
                m.set(q, p, C64::new(0.0, 0.0));
                let dp = m.get(p, p).re;
                let dq = m.get(q, q).re;
                m.set(p, p, C64::new(dp, 0.0));
                m.set(q, q, C64::new(dq, 0.0));
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * u_pp + vkq * u_qp);
                    v.set(k, q, vkp * u_pq + vkq * u_qq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).re.total_cmp(&m.get(j, j).re));
    let values = order.iter().map(|&i| m.get(i, i).re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vectors.set(k, new, v.get(k, old));
        }
    }
    Ok(EigenResult { values, vectors })
}

pub fn min_eigenvalue(a: &HermitianMatrix) -> Result<f64> {
    Ok(hermitian_eigen(a)?.min())
}

/// True iff the smallest eigenvalue is at least `-psd_tol * max(1, max_abs_entry)`.
pub fn is_psd(a: &HermitianMatrix, tol: &ToleranceConfig) -> Result<bool> {
    let e = hermitian_eigen(a)?;
    Ok(e.min() >= -tol.psd_tol * a.tolerance_scale())
}

/// Number of eigenvalues above `rank_tol * max(1, max_abs_entry)`.
pub fn numeric_rank(a: &HermitianMatrix, tol: &ToleranceConfig) -> Result<usize> {
    let e = hermitian_eigen(a)?;
    let scale = a.tolerance_scale();
    if e.min() < -tol.psd_tol * scale {
        return precondition(format!(
            "numeric rank needs a PSD matrix; smallest eigenvalue is {:e}",
            e.min()
        ));
    }
    Ok(count_above(&e.values, tol.rank_tol * scale))
}

pub(crate) fn count_above(values: &[f64], threshold: f64) -> usize {
    values.iter().filter(|&&v| v > threshold).count()
}

/// Gram factor `G` with `G* G = K`; column `j` of `G` is the vector `k_j`
/// with `K(i, j) = <k_j, k_i>`.
pub fn gram_columns(k: &HermitianMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let e = hermitian_eigen(k)?;
    if e.min() <= tol.psd_tol * k.tolerance_scale() {
        return precondition(format!(
            "Gram factorization needs a positive definite matrix; smallest eigenvalue is {:e}",
            e.min()
        ));
    }
    // G = diag(sqrt(values)) V*
    let n = k.dim;
    let mut g = e.vectors.adjoint();
    for i in 0..n {
        let s = e.values[i].sqrt();
        for j in 0..n {
            let v = g.get(i, j) * s;
            g.set(i, j, v);
        }
    }
    Ok(g)
}

/// `A^{-1/2}` for positive definite `A`.
pub(crate) fn inverse_sqrt(a: &HermitianMatrix, tol: &ToleranceConfig) -> Result<HermitianMatrix> {
    let e = hermitian_eigen(a)?;
    if e.min() <= tol.psd_tol * a.tolerance_scale() {
        return precondition(format!(
            "matrix is not positive definite; smallest eigenvalue is {:e}",
            e.min()
        ));
    }
    let n = a.dim;
    let mut scaled = e.vectors.clone();
    for i in 0..n {
        for k in 0..n {
            let v = scaled.get(i, k) / e.values[k].sqrt();
            scaled.set(i, k, v);
        }
    }
    Ok(HermitianMatrix::symmetrize(&scaled.matmul(&e.vectors.adjoint())))
}

/// Euclidean projection onto the PSD cone: negative eigenvalues clipped to zero.
pub(crate) fn project_psd(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let mut e = hermitian_eigen(a)?;
    for v in e.values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(HermitianMatrix::symmetrize(&e.reconstruct()))
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
