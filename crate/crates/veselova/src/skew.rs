//! Skew-symmetric matrices — the Lie algebra so(n) — stored as the strict
//! upper triangle in row-major pair order (0,1), (0,2), ..., (1,2), ...
//!
//! Conventions:
//! * wedge product: `a ∧ b = a bᵀ − b aᵀ`, so `(a ∧ b)_{ij} = a_i b_j − a_j b_i`;
//! * pairing: `⟨A, B⟩ = ½ tr(Aᵀ B) = Σ_{i<j} A_{ij} B_{ij}`, under which
//!   `⟨a ∧ b, Ω⟩ = aᵀ Ω b`;
//! * norm: `|A| = √⟨A, A⟩` (the singular value of a wedge of orthonormal
//!   vectors is exactly this norm).

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, OrthogonalMatrix, SquareMatrix, Vector};
use crate::scalar::Real;

/// Skew-symmetric matrix storing only the strict upper triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix<T> {
    n: usize,
    /// Entries (i,j), i<j, in row-major order of the upper triangle.
    upper: Vec<T>,
}

#[inline]
fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    // entries before row i: Σ_{r<i} (n−1−r) = i(2n−i−1)/2
    i * (2 * n - i - 1) / 2 + j - i - 1
}

impl<T: Real> SkewMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            upper: vec![T::zero(); n * (n - 1) / 2],
        }
    }

    /// Number of independent entries, `n(n-1)/2`.
    pub fn upper_len(n: usize) -> usize {
        n * (n - 1) / 2
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Builds from the strict upper triangle in pair order.
    pub fn from_upper(n: usize, upper: Vec<T>) -> Result<Self> {
        if upper.len() != Self::upper_len(n) {
            return Err(Error::DimensionMismatch {
                context: "skew matrix upper triangle",
                expected: Self::upper_len(n),
                got: upper.len(),
            });
        }
        Ok(Self { n, upper })
    }

    /// The strict upper triangle in pair order (0,1), (0,2), ..., (1,2), ...
    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    /// Entry (i,j) with the skew sign convention.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        use core::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.upper[pair_index(self.n, i, j)],
            Greater => -self.upper[pair_index(self.n, j, i)],
            Equal => T::zero(),
        }
    }

    /// Sets entry (i,j), i≠j, respecting skew symmetry.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        use core::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.upper[pair_index(self.n, i, j)] = value,
            Greater => self.upper[pair_index(self.n, j, i)] = -value,
            Equal => panic!("diagonal of a skew matrix is identically zero"),
        }
    }

    /// Wedge product `a ∧ b = a bᵀ − b aᵀ`.
    pub fn wedge(a: &Vector<T>, b: &Vector<T>) -> Self {
        debug_assert_eq!(a.dim(), b.dim());
        let n = a.dim();
        let mut w = Self::zeros(n);
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                w.upper[idx] = a[i] * b[j] - a[j] * b[i];
                idx += 1;
            }
        }
        w
    }

    /// Pairing `⟨A, B⟩ = ½ tr(Aᵀ B)`.
    pub fn pairing(&self, other: &Self) -> T {
        debug_assert_eq!(self.n, other.n);
        self.upper
            .iter()
            .zip(&other.upper)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    /// Norm induced by the pairing.
    pub fn norm(&self) -> T {
        self.pairing(self).sqrt()
    }

    /// Matrix–vector product `Ω v`.
    pub fn apply(&self, v: &Vector<T>) -> Vector<T> {
        debug_assert_eq!(self.n, v.dim());
        let n = self.n;
        let mut out = Vector::zeros(n);
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                let w = self.upper[idx];
                out[i] += w * v[j];
                out[j] -= w * v[i];
                idx += 1;
            }
        }
        out
    }

    /// Commutator `[A, B] = A B − B A` (skew again), entry-wise:
    /// `[A,B]_{ij} = Σ_k (A_{ik} B_{kj} − B_{ik} A_{kj})`.
    pub fn commutator(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut c = Self::zeros(n);
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                let mut acc = T::zero();
                for k in 0..n {
                    acc += self.get(i, k) * other.get(k, j) - other.get(i, k) * self.get(k, j);
                }
                c.upper[idx] = acc;
                idx += 1;
            }
        }
        c
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, &b) in out.upper.iter_mut().zip(&other.upper) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, &b) in out.upper.iter_mut().zip(&other.upper) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = self.clone();
        for a in out.upper.iter_mut() {
            *a *= s;
        }
        out
    }

    /// `self += s * other` in place.
    pub fn axpy(&mut self, s: T, other: &Self) {
        debug_assert_eq!(self.n, other.n);
        for (a, &b) in self.upper.iter_mut().zip(&other.upper) {
            *a += s * b;
        }
    }

    pub fn to_dense(&self) -> SquareMatrix<T> {
        SquareMatrix::from_fn(self.n, |i, j| self.get(i, j))
    }

    /// Validates skew symmetry of a dense matrix and compresses it.
    /// The symmetric part must vanish within `tol` (absolute, Frobenius).
    pub fn from_dense(m: &SquareMatrix<T>, tol: T) -> Result<Self> {
        let n = m.dim();
        let mut sym_sq = T::zero();
        for i in 0..n {
            for j in 0..n {
                let s = m[(i, j)] + m[(j, i)];
                sym_sq += s * s;
            }
        }
        let sym = (sym_sq / T::lit(4.0)).sqrt();
        if sym > tol {
            return Err(Error::InvalidState {
                context: "skew matrix from dense",
                what: "|sym(M)|_F",
                value: sym.to_f64().unwrap_or(f64::NAN),
                tol: tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        let mut out = Self::zeros(n);
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                out.upper[idx] = (m[(i, j)] - m[(j, i)]) / T::lit(2.0);
                idx += 1;
            }
        }
        Ok(out)
    }

    /// Conjugation `Rᵀ Ω R` (frame change) for orthogonal `R`.
    pub fn conjugated_by(&self, r: &OrthogonalMatrix<T>) -> Self {
        let dense = r
            .matrix()
            .transpose()
            .mul(&self.to_dense())
            .mul(r.matrix());
        // Skew exactly up to roundoff; symmetrize rather than validate.
        let n = self.n;
        let mut out = Self::zeros(n);
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                out.upper[idx] = (dense[(i, j)] - dense[(j, i)]) / T::lit(2.0);
                idx += 1;
            }
        }
        out
    }

    /// Singular values (each appears with multiplicity two for skew
    /// matrices), sorted descending; computed from the eigenvalues of ΩᵀΩ.
    pub fn singular_values(&self) -> Vec<T> {
        let d = self.to_dense();
        let sym = d.transpose().mul(&d);
        symmetric_eigenvalues(&sym)
            .into_iter()
            .map(|e| e.max(T::zero()).sqrt())
            .collect()
    }

    /// Exponential `exp(t Ω)` for **rank-two** Ω via the Rodrigues-type
    /// closed form
    /// `exp(tΩ) = Id + (sin tθ / θ) Ω + ((1 − cos tθ) / θ²) Ω²`,
    /// `θ = |Ω|`. Fails with `RankError` when the third singular value is
    /// not negligible against the first (ratio ≥ 1e-6; the values come from
    /// the Gram matrix ΩᵀΩ, whose true zeros only resolve to about √ε ≈ 1e-8,
    /// so a tighter guard would reject exact wedges).
    pub fn exp_rank2(&self, t: T) -> Result<OrthogonalMatrix<T>> {
        let n = self.n;
        let theta = self.norm();
        if theta == T::zero() {
            return Ok(OrthogonalMatrix::identity(n));
        }
        let sv = self.singular_values();
        let tol = T::lit(1e-6);
        if sv.len() >= 3 && sv[0] > T::zero() {
            let ratio = sv[2] / sv[0];
            if ratio >= tol {
                return Err(Error::RankError {
                    sigma_ratio: ratio.to_f64().unwrap_or(f64::NAN),
                    tol: tol.to_f64().unwrap_or(1e-6),
                });
            }
        }
        let d = self.to_dense();
        let d2 = d.mul(&d);
        let angle = t * theta;
        let c1 = angle.sin() / theta;
        let c2 = (T::one() - angle.cos()) / (theta * theta);
        let mut out = SquareMatrix::identity(n);
        out.axpy(c1, &d);
        out.axpy(c2, &d2);
        OrthogonalMatrix::try_new(out, crate::linalg::default_orth_tol::<T>())
    }
}
