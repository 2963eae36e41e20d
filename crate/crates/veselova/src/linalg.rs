//! Dense real vectors and square matrices sized for rigid-body work
//! (dimensions are small, typically 3..=8), plus the factorizations the
//! dynamics needs: Cholesky solves, LU determinants, symmetric eigenvalues
//! via cyclic Jacobi, and polar reorthonormalization by Newton–Schulz
//! iteration.

use crate::error::{Error, Result};
use crate::scalar::Real;
use rand::Rng;
use rand_distr::StandardNormal;

// ---------------------------------------------------------------------------
// Vector
// ---------------------------------------------------------------------------

/// Dense real vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector<T> {
    data: Vec<T>,
}

impl<T: Real> Vector<T> {
    /// Zero vector of dimension `n`.
    pub fn zeros(n: usize) -> Self {
        Self {
            data: vec![T::zero(); n],
        }
    }

    /// Wraps an owned buffer.
    pub fn from_vec(data: Vec<T>) -> Self {
        Self { data }
    }

    /// `i`-th standard basis vector of dimension `n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.data[i] = T::one();
        v
    }

    /// Builds a vector from `f64` literals (convenience for tests/presets).
    pub fn from_f64s(entries: &[f64]) -> Self {
        Self {
            data: entries.iter().map(|&x| T::lit(x)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn iter(&self) -> core::slice::Iter<'_, T> {
        self.data.iter()
    }

    /// Euclidean inner product.
    pub fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    /// Returns `self / |self|`, failing on (near-)zero input.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= T::zero() || !n.is_finite() {
            return Err(Error::DegenerateConfiguration {
                context: "vector normalization",
                residual: n.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(self.scale(T::one() / n))
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    /// `self += s * other` in place.
    pub fn axpy(&mut self, s: T, other: &Self) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// Removes the component along a **unit** vector: `self -= (self·u) u`.
    pub fn project_off_unit(&mut self, u: &Self) {
        let c = self.dot(u);
        self.axpy(-c, u);
    }

    /// Entry-wise (Hadamard) product; used for diagonal-matrix application.
    pub fn hadamard(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a * b)
                .collect(),
        }
    }

    /// Concatenation (used for phase-space vectors on T*S^{n-1}).
    pub fn concat(&self, other: &Self) -> Self {
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Self { data }
    }

    /// Splits a phase-space vector back into two halves.
    pub fn split(&self, at: usize) -> (Self, Self) {
        (
            Self::from_vec(self.data[..at].to_vec()),
            Self::from_vec(self.data[at..].to_vec()),
        )
    }

    /// Standard normal sample (entries i.i.d. N(0,1)).
    pub fn standard_normal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self {
            data: (0..n)
                .map(|_| {
                    let x: f64 = rng.sample(StandardNormal);
                    T::lit(x)
                })
                .collect(),
        }
    }

    /// Maximum absolute entry.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }
}

impl<T: Real> core::ops::Index<usize> for Vector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.data[i]
    }
}

impl<T: Real> core::ops::IndexMut<usize> for Vector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.data[i]
    }
}

// ---------------------------------------------------------------------------
// SquareMatrix
// ---------------------------------------------------------------------------

/// Dense square matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds from a closure over (row, col).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from rows; all rows must share the outer length.
    pub fn from_rows(rows: &[Vector<T>]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| rows[i][j])
    }

    /// Builds an `n x n` matrix from `f64` literals in row-major order.
    pub fn from_f64s(n: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), n * n);
        Self {
            n,
            data: entries.iter().map(|&x| T::lit(x)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vector<T> {
        Vector::from_vec(self.data[i * self.n..(i + 1) * self.n].to_vec())
    }

    pub fn col(&self, j: usize) -> Vector<T> {
        Vector::from_vec((0..self.n).map(|i| self[(i, j)]).collect())
    }

    pub fn set_row(&mut self, i: usize, row: &Vector<T>) {
        debug_assert_eq!(row.dim(), self.n);
        for j in 0..self.n {
            self[(i, j)] = row[j];
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix–vector product.
    pub fn matvec(&self, v: &Vector<T>) -> Vector<T> {
        debug_assert_eq!(self.n, v.dim());
        let mut out = Vector::zeros(self.n);
        for i in 0..self.n {
            let mut acc = T::zero();
            for j in 0..self.n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, &b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, &b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    /// `self += s * other` in place.
    pub fn axpy(&mut self, s: T, other: &Self) {
        debug_assert_eq!(self.n, other.n);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &x| acc + x * x)
            .sqrt()
    }

    /// Frobenius distance to the identity of `self^T self`; the working
    /// measure of orthogonality error.
    pub fn orthogonality_error(&self) -> T {
        let gtg = self.transpose().mul(self);
        let mut acc = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { T::one() } else { T::zero() };
                let d = gtg[(i, j)] - target;
                acc += d * d;
            }
        }
        acc.sqrt()
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn det(&self) -> T {
        let n = self.n;
        let mut a = self.clone();
        let mut det = T::one();
        for k in 0..n {
            // pivot
            let mut piv = k;
            let mut best = a[(k, k)].abs();
            for i in k + 1..n {
                if a[(i, k)].abs() > best {
                    best = a[(i, k)].abs();
                    piv = i;
                }
            }
            if best == T::zero() {
                return T::zero();
            }
            if piv != k {
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(piv, j)];
                    a[(piv, j)] = tmp;
                }
                det = -det;
            }
            det *= a[(k, k)];
            let inv = T::one() / a[(k, k)];
            for i in k + 1..n {
                let factor = a[(i, k)] * inv;
                if factor == T::zero() {
                    continue;
                }
                for j in k..n {
                    let akj = a[(k, j)];
                    a[(i, j)] -= factor * akj;
                }
            }
        }
        det
    }
}

impl<T: Real> core::ops::Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T: Real> core::ops::IndexMut<(usize, usize)> for SquareMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

// ---------------------------------------------------------------------------
// OrthogonalMatrix
// ---------------------------------------------------------------------------

/// Default admission tolerance for orthogonal matrices.
pub fn default_orth_tol<T: Real>() -> T {
    T::lit(1e-10).max(T::epsilon() * T::lit(512.0))
}

/// A square matrix certified (at construction) to be orthogonal within a
/// tolerance. The inverse is the transpose by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalMatrix<T> {
    m: SquareMatrix<T>,
}

impl<T: Real> OrthogonalMatrix<T> {
    /// Admits a matrix after checking `|g^T g - Id|_F <= orth_tol`.
    pub fn try_new(m: SquareMatrix<T>, orth_tol: T) -> Result<Self> {
        let err = m.orthogonality_error();
        if err > orth_tol {
            return Err(Error::InvalidState {
                context: "orthogonal matrix admission",
                what: "|g^T g - Id|_F",
                value: err.to_f64().unwrap_or(f64::NAN),
                tol: orth_tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { m })
    }

    /// Admits with the default tolerance.
    pub fn new(m: SquareMatrix<T>) -> Result<Self> {
        Self::try_new(m, default_orth_tol::<T>())
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: SquareMatrix::identity(n),
        }
    }

    /// Wraps without checking; for internal use where orthogonality is
    /// guaranteed by construction (products, transposes, polar output).
    pub(crate) fn from_matrix_unchecked(m: SquareMatrix<T>) -> Self {
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &SquareMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> SquareMatrix<T> {
        self.m
    }

    pub fn row(&self, i: usize) -> Vector<T> {
        self.m.row(i)
    }

    pub fn col(&self, j: usize) -> Vector<T> {
        self.m.col(j)
    }

    /// Transpose, which is also the inverse.
    pub fn transpose(&self) -> Self {
        Self {
            m: self.m.transpose(),
        }
    }

    /// Product of two orthogonal matrices (orthogonal by construction).
    pub fn mul(&self, other: &Self) -> Self {
        Self {
            m: self.m.mul(&other.m),
        }
    }

    pub fn matvec(&self, v: &Vector<T>) -> Vector<T> {
        self.m.matvec(v)
    }

    /// Current deviation from orthogonality.
    pub fn orthogonality_error(&self) -> T {
        self.m.orthogonality_error()
    }

    /// Projects onto the nearest orthogonal matrix (polar factor).
    pub fn reorthonormalize(m: &SquareMatrix<T>) -> Result<Self> {
        Ok(Self {
            m: polar_factor(m)?,
        })
    }

    /// Haar-distributed random orthogonal matrix (Gram–Schmidt of a Gaussian
    /// matrix with the positive-diagonal convention).
    pub fn random_haar<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let cols: Vec<Vector<T>> = (0..n).map(|_| Vector::standard_normal(n, rng)).collect();
            if let Some(q) = orthonormalize(&cols, n, T::lit(1e-6)) {
                // `orthonormalize` normalizes in order, which realizes the
                // QR positive-diagonal convention needed for Haar measure.
                let m = SquareMatrix::from_fn(n, |i, j| q[j][i]);
                return Self { m };
            }
        }
    }
}

/// Polar factor of `m` (nearest orthogonal matrix) by Newton–Schulz
/// iteration. Requires the input to be within Frobenius distance 0.5 of the
/// orthogonal group, which any drift-controlled integrator step satisfies by
/// orders of magnitude.
pub fn polar_factor<T: Real>(m: &SquareMatrix<T>) -> Result<SquareMatrix<T>> {
    let n = m.dim();
    let guard = T::lit(0.5);
    let err0 = m.orthogonality_error();
    if !err0.is_finite() || err0 >= guard {
        return Err(Error::DriftError {
            context: "polar reorthonormalization",
            value: err0.to_f64().unwrap_or(f64::NAN),
            limit: guard.to_f64().unwrap_or(0.5),
        });
    }
    let floor = T::epsilon() * T::from_index(n) * T::lit(4.0);
    let mut x = m.clone();
    let mut prev = err0;
    for _ in 0..60 {
        if prev <= floor {
            break;
        }
        // X <- 1.5 X - 0.5 X (X^T X)
        let e = x.transpose().mul(&x);
        let mut next = x.scale(T::lit(1.5));
        next.axpy(-T::lit(0.5), &x.mul(&e));
        x = next;
        let err = x.orthogonality_error();
        if err >= prev && prev <= T::lit(1e3) * floor {
            // stagnated at the roundoff plateau
            break;
        }
        prev = err;
    }
    let final_err = x.orthogonality_error();
    let accept = T::epsilon() * T::from_index(n) * T::lit(500.0);
    if final_err > accept {
        return Err(Error::DriftError {
            context: "polar iteration did not converge",
            value: final_err.to_f64().unwrap_or(f64::NAN),
            limit: accept.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Orthonormalization helpers
// ---------------------------------------------------------------------------

/// Modified Gram–Schmidt with a re-orthogonalization pass. Returns `target`
/// orthonormal vectors built from `candidates` in order, skipping candidates
/// whose independent component is below `drop_tol`; `None` if the candidates
/// cannot supply `target` independent directions.
pub fn orthonormalize<T: Real>(
    candidates: &[Vector<T>],
    target: usize,
    drop_tol: T,
) -> Option<Vec<Vector<T>>> {
    let mut basis: Vec<Vector<T>> = Vec::with_capacity(target);
    for cand in candidates {
        if basis.len() == target {
            break;
        }
        let mut v = cand.clone();
        for _ in 0..2 {
            for b in &basis {
                v.project_off_unit(b);
            }
        }
        let norm = v.norm();
        if norm > drop_tol {
            basis.push(v.scale(T::one() / norm));
        }
    }
    if basis.len() == target {
        Some(basis)
    } else {
        None
    }
}

/// Extends a (possibly empty) orthonormal set to an orthonormal basis of the
/// full space using standard basis vectors, then (if needed) seeded Gaussian
/// candidates. `start` entries must already be orthonormal.
pub fn orthonormal_completion<T: Real, R: Rng + ?Sized>(
    start: &[Vector<T>],
    n: usize,
    rng: &mut R,
) -> Vec<Vector<T>> {
    let mut cands: Vec<Vector<T>> = start.to_vec();
    for i in 0..n {
        cands.push(Vector::basis(n, i));
    }
    loop {
        if let Some(basis) = orthonormalize(&cands, n, T::lit(1e-6)) {
            return basis;
        }
        // Pathological cancellation; extremely unlikely, but recoverable.
        cands.push(Vector::standard_normal(n, rng));
    }
}

// ---------------------------------------------------------------------------
// Cholesky solve (SPD systems)
// ---------------------------------------------------------------------------

/// Solves `A x = b` for symmetric positive-definite `A` via Cholesky.
pub fn cholesky_solve<T: Real>(a: &SquareMatrix<T>, b: &Vector<T>) -> Result<Vector<T>> {
    let n = a.dim();
    debug_assert_eq!(b.dim(), n);
    let mut l = SquareMatrix::<T>::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[(i, j)];
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if sum <= T::zero() || !sum.is_finite() {
                    return Err(Error::SingularSystem {
                        pivot: sum.to_f64().unwrap_or(f64::NAN),
                        index: i,
                    });
                }
                l[(i, j)] = sum.sqrt();
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    // forward substitution L y = b
    let mut y = Vector::zeros(n);
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[(i, k)] * y[k];
        }
        y[i] = sum / l[(i, i)];
    }
    // back substitution L^T x = y
    let mut x = Vector::zeros(n);
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in i + 1..n {
            sum -= l[(k, i)] * x[k];
        }
        x[i] = sum / l[(i, i)];
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Symmetric eigenvalues (cyclic Jacobi)
// ---------------------------------------------------------------------------

/// Eigenvalues of a symmetric matrix, sorted descending, via cyclic Jacobi
/// rotations. Input symmetry is assumed (only the given entries are used
/// symmetrically); intended for the small matrices this crate works with.
pub fn symmetric_eigenvalues<T: Real>(m: &SquareMatrix<T>) -> Vec<T> {
    let n = m.dim();
    let mut a = m.clone();
    let scale = a.frobenius_norm().max(T::one());
    let tol = T::epsilon() * scale * T::from_index(n);
    for _sweep in 0..64 {
        let mut off = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for i in 0..n {
            for j in i + 1..n {
                let apq = a[(i, j)];
                if apq.abs() <= T::epsilon() * scale {
                    continue;
                }
                let app = a[(i, i)];
                let aqq = a[(j, j)];
                let tau = (aqq - app) / (T::lit(2.0) * apq);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // rotate rows/cols i, j
                for k in 0..n {
                    let aik = a[(i, k)];
                    let ajk = a[(j, k)];
                    a[(i, k)] = c * aik - s * ajk;
                    a[(j, k)] = s * aik + c * ajk;
                }
                for k in 0..n {
                    let aki = a[(k, i)];
                    let akj = a[(k, j)];
                    a[(k, i)] = c * aki - s * akj;
                    a[(k, j)] = s * aki + c * akj;
                }
            }
        }
    }
    let mut vals: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
    vals.sort_by(|x, y| y.partial_cmp(x).unwrap_or(core::cmp::Ordering::Equal));
    vals
}
