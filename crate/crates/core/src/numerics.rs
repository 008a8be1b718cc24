//! Dense complex linear algebra for small Hermitian operators.
//!
//! Composite indices are big-endian in the dimension list: subsystem 0 is
//! the leftmost tensor factor and varies slowest.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Entrywise tolerance on `|M - M^dagger|`, scaled by `max(1, max|M_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-14;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = re(1.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| re(x)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = re(d);
        }
        m
    }

    /// The projector-like outer product `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `U * self * U^dagger`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.dagger())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.scale_c(re(s))
    }

    pub fn scale_c(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max_ij |M_ij - conj(M_ji)|`; infinite for non-square input.
    pub fn hermitian_asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_asymmetry() <= HERMITIAN_TOL * self.max_abs().max(1.0)
    }

    /// `(M + M^dagger) / 2`.
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// Errors unless the matrix is Hermitian within tolerance, returning the
    /// symmetrized copy.
    pub fn checked_hermitian(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let asymmetry = self.hermitian_asymmetry();
        if asymmetry > HERMITIAN_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian { asymmetry });
        }
        Ok(self.symmetrized())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale(-1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Eigen-decomposition of a Hermitian matrix: `H = V diag(eigenvalues) V^dagger`.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns.
    pub eigenvectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|x| x)
    }

    /// `V diag(f(eigenvalues)) V^dagger`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fx: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * fx[k]).sum()
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        (0..self.eigenvalues.len())
            .map(|i| self.eigenvectors[(i, k)])
            .collect()
    }
}

/// Kronecker product with `(a ⊗ b)[(i,k),(j,l)] = a[i,j] b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |r, s| {
        a[(r / br, s / bc)] * b[(r % br, s % bc)]
    })
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    factors
        .iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Cyclic complex Jacobi eigensolver.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<EigenSystem> {
    let mut a = h.checked_hermitian()?;
    let n = a.rows;
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_REL_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eig(h)?.eigenvalues)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[p,q]` with the unitary
/// `J = [[c, s e^{iφ}], [-s e^{-iφ}, c]]` on the (p, q) plane, `a ← J† a J`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    let ph = apq / mag;

    let n = a.rows;
    // columns: a ← a J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * cs - akq * ph.conj() * sn;
        a[(k, q)] = akp * ph * sn + akq * cs;
    }
    // rows: a ← J† a
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * cs - aqk * ph * sn;
        a[(q, k)] = apk * ph.conj() * sn + aqk * cs;
    }
    a[(p, q)] = re(0.0);
    a[(q, p)] = re(0.0);
    a[(p, p)] = re(a[(p, p)].re);
    a[(q, q)] = re(a[(q, q)].re);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cs - vkq * ph.conj() * sn;
        v[(k, q)] = vkp * ph * sn + vkq * cs;
    }
}

/// `||h||_1` for Hermitian `h`, the sum of absolute eigenvalues.
pub fn trace_norm(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(h)?.iter().map(|x| x.abs()).sum())
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_function(h: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(h)?.map_eigenvalues(f))
}

fn check_dims(m: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows != total || dims.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} (product {total}) do not fit a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    Ok(())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Traces out every subsystem not listed in `keep`.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_dims(m, dims)?;
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "subsystem {bad} out of range for dims {dims:?}"
        )));
    }
    let mut kept_mask = vec![false; dims.len()];
    for &k in keep {
        kept_mask[k] = true;
    }
    let st = strides(dims);
    let n = m.rows;

    // split every composite index into (kept index, traced index)
    let split: Vec<(usize, usize)> = (0..n)
        .map(|idx| {
            let (mut kept, mut traced) = (0, 0);
            for (k, (&d, &s)) in dims.iter().zip(&st).enumerate() {
                let digit = (idx / s) % d;
                if kept_mask[k] {
                    kept = kept * d + digit;
                } else {
                    traced = traced * d + digit;
                }
            }
            (kept, traced)
        })
        .collect();

    let out_dim: usize = dims
        .iter()
        .zip(&kept_mask)
        .filter(|(_, &k)| k)
        .map(|(&d, _)| d)
        .product();
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for i in 0..n {
        for j in 0..n {
            if split[i].1 == split[j].1 {
                out[(split[i].0, split[j].0)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Transposes the indices of one subsystem. Exact involution.
pub fn partial_transpose(m: &ComplexMatrix, dims: &[usize], subsystem: usize) -> Result<ComplexMatrix> {
    check_dims(m, dims)?;
    if subsystem >= dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem {subsystem} out of range for dims {dims:?}"
        )));
    }
    let s = strides(dims)[subsystem];
    let d = dims[subsystem];
    let n = m.rows;
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let di = (i / s) % d;
        for j in 0..n {
            let dj = (j / s) % d;
            let i2 = i - di * s + dj * s;
            let j2 = j - dj * s + di * s;
            out[(i2, j2)] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Partial transpose over several subsystems.
pub fn partial_transpose_many(m: &ComplexMatrix, dims: &[usize], subsystems: &[usize]) -> Result<ComplexMatrix> {
    check_dims(m, dims)?;
    subsystems
        .iter()
        .try_fold(m.clone(), |acc, &k| partial_transpose(&acc, dims, k))
}

/// `1 ⊗ ... ⊗ op ⊗ ... ⊗ 1` with `op` in position `subsystem`.
pub fn embed_local(op: &ComplexMatrix, dims: &[usize], subsystem: usize) -> Result<ComplexMatrix> {
    if subsystem >= dims.len() || !op.is_square() || op.rows != dims[subsystem] {
        return Err(Error::DimensionMismatch(format!(
            "cannot embed a {}x{} operator at position {subsystem} of {dims:?}",
            op.rows, op.cols
        )));
    }
    let left: usize = dims[..subsystem].iter().product();
    let right: usize = dims[subsystem + 1..].iter().product();
    Ok(kron_all(&[
        &ComplexMatrix::identity(left),
        op,
        &ComplexMatrix::identity(right),
    ]))
}

/// Applies a linear map on one tensor factor, identity elsewhere, by acting
/// on each `d x d` block of the composite operator.
pub fn apply_local(
    m: &ComplexMatrix,
    dims: &[usize],
    subsystem: usize,
    map: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
) -> Result<ComplexMatrix> {
    check_dims(m, dims)?;
    if subsystem >= dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem {subsystem} out of range for dims {dims:?}"
        )));
    }
    let d = dims[subsystem];
    let left: usize = dims[..subsystem].iter().product();
    let right: usize = dims[subsystem + 1..].iter().product();
    let index = |l: usize, a: usize, r: usize| (l * d + a) * right + r;

    let mut out = ComplexMatrix::zeros(m.rows, m.cols);
    for l in 0..left {
        for r in 0..right {
            for l2 in 0..left {
                for r2 in 0..right {
                    let block = ComplexMatrix::from_fn(d, d, |a, b| m[(index(l, a, r), index(l2, b, r2))]);
                    let mapped = map(&block)?;
                    if mapped.rows != d || mapped.cols != d {
                        return Err(Error::DimensionMismatch(format!(
                            "local map returned {}x{}, expected {d}x{d}",
                            mapped.rows, mapped.cols
                        )));
                    }
                    for a in 0..d {
                        for b in 0..d {
                            out[(index(l, a, r), index(l2, b, r2))] = mapped[(a, b)];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The four Pauli matrices `σ_0 = 1, σ_x, σ_y, σ_z`.
pub fn pauli(mu: usize) -> ComplexMatrix {
    let z = re(0.0);
    let o = re(1.0);
    let i = c(0.0, 1.0);
    let data = match mu {
        0 => vec![o, z, z, o],
        1 => vec![z, o, o, z],
        2 => vec![z, -i, i, z],
        3 => vec![o, z, z, -o],
        _ => panic!("Pauli index {mu} out of range"),
    };
    ComplexMatrix { rows: 2, cols: 2, data }
}
