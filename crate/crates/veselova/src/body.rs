//! The rigid body's mass data: positive principal moments J_1..J_n, the
//! physical inertia operator `𝕀(Ω) = 𝕁Ω + Ω𝕁` acting entrywise as
//! `(J_i + J_j) Ω_ij`, eigenvalue-multiplicity classification of the body's
//! symmetry group, principal-plane enumeration, and the diagonal
//! factorization checks for when `𝕀(a∧b) = (Aa)∧(Ab)` has a solution.

use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, OrthogonalMatrix, SquareMatrix, Vector};
use crate::scalar::Real;
use crate::skew::SkewMatrix;
use rand::Rng;

/// Default relative tolerance for grouping equal moments.
pub fn default_eigen_tol<T: Real>() -> T {
    T::lit(1e-9)
}

/// Diagonal mass tensor 𝕁 = diag[J_1, ..., J_n], all entries positive, n ≥ 3.
#[derive(Clone, Debug, PartialEq)]
pub struct MassTensor<T> {
    diag: Vec<T>,
}

/// Symmetry type of the body, read off the multiplicity pattern of the
/// moments (the body's symmetry group consists of the orthogonal matrices
/// commuting with 𝕁, which is determined by this pattern).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymmetryClass {
    /// All moments distinct.
    Generic,
    /// Multiplicities {1, n−1}: one distinguished axis (0-based index).
    Axisymmetric { axis: usize },
    /// Multiplicities {r, n−r} with 2 ≤ r ≤ n−r.
    Cylindrical { r: usize, r_prime: usize },
    /// Any other multiplicity pattern; groups of indices (0-based) sharing a
    /// moment, ordered by increasing moment.
    OtherMultiplicity { groups: Vec<Vec<usize>> },
}

/// A coordinate principal plane span{f_i, f_j} with its moment J_i + J_j.
/// Indices are 0-based. For degenerate moments every plane inside the
/// eigenspace is principal; the coordinate pairs enumerate representatives.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalPlane<T> {
    pub axes: (usize, usize),
    pub moment: T,
}

impl<T: Real> MassTensor<T> {
    /// Admits a list of moments after checking positivity and n ≥ 3.
    pub fn try_new(diag: Vec<T>) -> Result<Self> {
        if diag.len() < 3 {
            return Err(Error::DimensionTooSmall {
                context: "mass tensor",
                min: 3,
                got: diag.len(),
            });
        }
        for (i, &j) in diag.iter().enumerate() {
            if !(j > T::zero()) || !j.is_finite() {
                return Err(Error::InvalidMass {
                    index: i,
                    value: j.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self { diag })
    }

    /// Convenience constructor from `f64` literals.
    pub fn from_f64s(diag: &[f64]) -> Result<Self> {
        Self::try_new(diag.iter().map(|&x| T::lit(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn moment(&self, i: usize) -> T {
        self.diag[i]
    }

    /// Moment of the principal plane span{f_i, f_j}: J_i + J_j.
    pub fn plane_moment(&self, i: usize, j: usize) -> T {
        self.diag[i] + self.diag[j]
    }

    /// `𝕁 q` (diagonal application).
    pub fn j_apply(&self, q: &Vector<T>) -> Vector<T> {
        debug_assert_eq!(q.dim(), self.dim());
        Vector::from_vec(
            self.diag
                .iter()
                .zip(q.iter())
                .map(|(&j, &x)| j * x)
                .collect(),
        )
    }

    /// `q · 𝕁 q`.
    pub fn quadratic_form(&self, q: &Vector<T>) -> T {
        debug_assert_eq!(q.dim(), self.dim());
        self.diag
            .iter()
            .zip(q.iter())
            .fold(T::zero(), |acc, (&j, &x)| acc + j * x * x)
    }

    /// Inertia operator `M = 𝕀(Ω) = 𝕁Ω + Ω𝕁`, entrywise `(J_i + J_j) Ω_ij`.
    pub fn inertia_apply(&self, om: &SkewMatrix<T>) -> SkewMatrix<T> {
        let n = self.dim();
        debug_assert_eq!(om.dim(), n);
        let mut out = om.clone();
        for i in 0..n {
            for j in i + 1..n {
                let scale = self.diag[i] + self.diag[j];
                let v = out.get(i, j) * scale;
                out.set(i, j, v);
            }
        }
        out
    }

    /// Inverse inertia `Ω = 𝕀⁻¹(M)`, entrywise `M_ij / (J_i + J_j)`.
    pub fn inertia_inverse_apply(&self, m: &SkewMatrix<T>) -> SkewMatrix<T> {
        let n = self.dim();
        debug_assert_eq!(m.dim(), n);
        let mut out = m.clone();
        for i in 0..n {
            for j in i + 1..n {
                let scale = self.diag[i] + self.diag[j];
                let v = out.get(i, j) / scale;
                out.set(i, j, v);
            }
        }
        out
    }

    /// Groups the indices by moment equality within relative tolerance
    /// `tol`; groups are ordered by increasing moment, indices ascending.
    pub fn eigen_groups(&self, tol: T) -> Vec<Vec<usize>> {
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            self.diag[a]
                .partial_cmp(&self.diag[b])
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &idx in &order {
            let start_new = match groups.last() {
                None => true,
                Some(g) => {
                    let prev = self.diag[*g.last().unwrap()];
                    let cur = self.diag[idx];
                    (cur - prev).abs() > tol * prev.abs().max(cur.abs())
                }
            };
            if start_new {
                groups.push(vec![idx]);
            } else {
                groups.last_mut().unwrap().push(idx);
            }
        }
        for g in groups.iter_mut() {
            g.sort_unstable();
        }
        groups
    }

    /// Classifies the multiplicity pattern of the moments.
    pub fn classify_symmetry(&self, tol: T) -> SymmetryClass {
        let n = self.dim();
        let groups = self.eigen_groups(tol);
        if groups.len() == n {
            return SymmetryClass::Generic;
        }
        if groups.len() == 2 {
            let (a, b) = (groups[0].len(), groups[1].len());
            if a.min(b) == 1 {
                let axis = if a == 1 { groups[0][0] } else { groups[1][0] };
                return SymmetryClass::Axisymmetric { axis };
            }
            return SymmetryClass::Cylindrical {
                r: a.min(b),
                r_prime: a.max(b),
            };
        }
        SymmetryClass::OtherMultiplicity { groups }
    }

    /// All coordinate principal planes achieving the minimal / maximal
    /// moment (ties grouped with relative tolerance 1e-12).
    pub fn extremal_planes(&self) -> (Vec<PrincipalPlane<T>>, Vec<PrincipalPlane<T>>) {
        let n = self.dim();
        let mut planes: Vec<PrincipalPlane<T>> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                planes.push(PrincipalPlane {
                    axes: (i, j),
                    moment: self.plane_moment(i, j),
                });
            }
        }
        let min = planes
            .iter()
            .map(|p| p.moment)
            .fold(T::infinity(), |a, b| a.min(b));
        let max = planes
            .iter()
            .map(|p| p.moment)
            .fold(-T::infinity(), |a, b| a.max(b));
        let tie = T::lit(1e-12);
        let minimal = planes
            .iter()
            .filter(|p| (p.moment - min).abs() <= tie * min.abs())
            .cloned()
            .collect();
        let maximal = planes
            .iter()
            .filter(|p| (p.moment - max).abs() <= tie * max.abs())
            .cloned()
            .collect();
        (minimal, maximal)
    }

    /// Diagonal matrix A with `𝕀(a∧b) = (Aa)∧(Ab)` for all a, b, when one
    /// exists:
    /// * n = 3: always, `A_i = √((J_i+J_j)(J_i+J_k)/(J_j+J_k))`;
    /// * n ≥ 4: only for an axisymmetric (or isotropic) body, with
    ///   `A_axis = (J_axis+J₂)/√(2J₂)` and `A_i = √(2J₂)` on the symmetric
    ///   block of moment J₂.
    ///
    /// Returns `Infeasible` otherwise.
    pub fn fj_matrix(&self) -> Result<Vector<T>> {
        let n = self.dim();
        let two = T::lit(2.0);
        if n == 3 {
            let j = &self.diag;
            let mut a = Vector::zeros(3);
            for i in 0..3 {
                let (p, q) = ((i + 1) % 3, (i + 2) % 3);
                a[i] = ((j[i] + j[p]) * (j[i] + j[q]) / (j[p] + j[q])).sqrt();
            }
            return Ok(a);
        }
        match self.classify_symmetry(default_eigen_tol::<T>()) {
            SymmetryClass::Axisymmetric { axis } => {
                let j_axis = self.diag[axis];
                // moment of the symmetric block
                let j2 = self.diag[if axis == 0 { 1 } else { 0 }];
                let a2 = (two * j2).sqrt();
                let mut a = Vector::from_vec(vec![a2; n]);
                a[axis] = (j_axis + j2) / a2;
                Ok(a)
            }
            SymmetryClass::OtherMultiplicity { groups } if groups.len() == 1 => {
                // isotropic body: 𝕀(Ω) = 2J·Ω = (Aa)∧(Ab) with A = √(2J)·Id
                let a = (two * self.diag[0]).sqrt();
                Ok(Vector::from_vec(vec![a; n]))
            }
            _ => Err(Error::Infeasible),
        }
    }

    /// Max over `samples` random unit-vector pairs of the pairing-norm
    /// residual `|𝕀(a∧b) − (Aa)∧(Ab)|`.
    pub fn fj_condition_residual<R: Rng + ?Sized>(
        &self,
        a_diag: &Vector<T>,
        samples: usize,
        rng: &mut R,
    ) -> T {
        let n = self.dim();
        debug_assert_eq!(a_diag.dim(), n);
        let mut worst = T::zero();
        for _ in 0..samples {
            let a = match Vector::standard_normal(n, rng).normalized() {
                Ok(v) => v,
                Err(_) => continue,
            };
            let b = match Vector::standard_normal(n, rng).normalized() {
                Ok(v) => v,
                Err(_) => continue,
            };
            let lhs = self.inertia_apply(&SkewMatrix::wedge(&a, &b));
            let rhs = SkewMatrix::wedge(&a.hadamard(a_diag), &b.hadamard(a_diag));
            worst = worst.max(lhs.sub(&rhs).norm());
        }
        worst
    }

    /// Least-squares diagonal candidate for the factorization condition:
    /// minimizes Σ_{i<j} (x_i + x_j − log(J_i+J_j))² and returns exp(x).
    /// When no exact factorization exists this candidate exhibits a residual
    /// bounded away from zero, which tests use as an infeasibility control.
    pub fn fj_least_squares(&self) -> Result<Vector<T>> {
        let n = self.dim();
        // Normal matrix of the pair-sum design: (n−2)·Id + 1·1ᵀ.
        let mut normal = SquareMatrix::<T>::identity(n).scale(T::from_index(n - 2));
        for i in 0..n {
            for j in 0..n {
                normal[(i, j)] += T::one();
            }
        }
        let mut rhs = Vector::zeros(n);
        for i in 0..n {
            let mut acc = T::zero();
            for j in 0..n {
                if i != j {
                    acc += (self.diag[i] + self.diag[j]).ln();
                }
            }
            rhs[i] = acc;
        }
        let x = cholesky_solve(&normal, &rhs)?;
        Ok(Vector::from_vec(x.iter().map(|&v| v.exp()).collect()))
    }

    /// Determinant of the leading 4×4 block of `𝕀((f₁+f₃)∧(f₂+f₄))`
    /// (0-based: (e₀+e₂)∧(e₁+e₃)), which equals `(J_1−J_3)²(J_2−J_4)²` for
    /// the first four moments. A nonzero value witnesses that the inertia
    /// operator does not preserve the set of rank-two matrices.
    pub fn rank2_preservation_witness(&self) -> Result<T> {
        let n = self.dim();
        if n < 4 {
            return Err(Error::DimensionTooSmall {
                context: "rank-two preservation witness",
                min: 4,
                got: n,
            });
        }
        let mut a = Vector::zeros(n);
        let mut b = Vector::zeros(n);
        a[0] = T::one();
        a[2] = T::one();
        b[1] = T::one();
        b[3] = T::one();
        let m = self.inertia_apply(&SkewMatrix::wedge(&a, &b));
        let block = SquareMatrix::from_fn(4, |i, j| m.get(i, j));
        Ok(block.det())
    }

    /// Random element of the body's symmetry group: block-Haar orthogonal
    /// within each group of equal moments, so that `g 𝕁 gᵀ = 𝕁`.
    pub fn random_symmetry_element<R: Rng + ?Sized>(
        &self,
        tol: T,
        rng: &mut R,
    ) -> OrthogonalMatrix<T> {
        let n = self.dim();
        let groups = self.eigen_groups(tol);
        let mut m = SquareMatrix::<T>::zeros(n);
        for g in &groups {
            let k = g.len();
            if k == 1 {
                // ±1 on a simple axis
                let sign = if rng.random_range(0..2u8) == 0 {
                    T::one()
                } else {
                    -T::one()
                };
                m[(g[0], g[0])] = sign;
            } else {
                let block = OrthogonalMatrix::<T>::random_haar(k, rng);
                for (bi, &gi) in g.iter().enumerate() {
                    for (bj, &gj) in g.iter().enumerate() {
                        m[(gi, gj)] = block.matrix()[(bi, bj)];
                    }
                }
            }
        }
        OrthogonalMatrix::from_matrix_unchecked(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn jt(diag: &[f64]) -> MassTensor<f64> {
        MassTensor::from_f64s(diag).unwrap()
    }

    #[test]
    fn admission_rules() {
        assert!(MassTensor::<f64>::from_f64s(&[1.0, 2.0]).is_err());
        assert!(matches!(
            MassTensor::<f64>::from_f64s(&[1.0, -2.0, 3.0]),
            Err(Error::InvalidMass { index: 1, .. })
        ));
        assert!(MassTensor::<f64>::from_f64s(&[1.0, 0.0, 3.0]).is_err());
        assert!(MassTensor::<f64>::from_f64s(&[1.0, 2.0, 3.0]).is_ok());
    }

    #[test]
    fn inertia_scales_principal_planes() {
        let j = jt(&[1.0, 2.0, 3.0]);
        let w = SkewMatrix::wedge(&Vector::basis(3, 0), &Vector::basis(3, 1));
        let m = j.inertia_apply(&w);
        assert_eq!(m.upper(), &[3.0, 0.0, 0.0]); // (J_1+J_2) = 3
        // isotropic: 𝕀 = 2J·id
        let iso = jt(&[1.0, 1.0, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let om = SkewMatrix::wedge(
            &Vector::standard_normal(3, &mut rng),
            &Vector::standard_normal(3, &mut rng),
        );
        let m = iso.inertia_apply(&om);
        assert!(m.sub(&om.scale(2.0)).norm() < 1e-14);
    }

    #[test]
    fn inertia_inverse_round_trip() {
        let j = jt(&[1.0, 2.0, 3.0, 4.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let upper = Vector::<f64>::standard_normal(6, &mut rng);
        let m = SkewMatrix::from_upper(4, upper.as_slice().to_vec()).unwrap();
        let om = j.inertia_inverse_apply(&m);
        let back = j.inertia_apply(&om);
        assert!(back.sub(&m).norm() < 1e-14);
        // hand value: M = 6 f1∧f2, J_1+J_2 = 3 → Ω = 2 f1∧f2
        let m = SkewMatrix::wedge(&Vector::basis(3, 0), &Vector::basis(3, 1)).scale(6.0);
        let j3 = jt(&[1.0, 2.0, 3.0]);
        assert_eq!(j3.inertia_inverse_apply(&m).upper(), &[2.0, 0.0, 0.0]);
    }

    #[test]
    fn inertia_is_symmetric_positive_definite() {
        let j = jt(&[0.3, 1.7, 2.2, 5.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let a = SkewMatrix::from_upper(
                4,
                Vector::<f64>::standard_normal(6, &mut rng).as_slice().to_vec(),
            )
            .unwrap();
            let b = SkewMatrix::from_upper(
                4,
                Vector::<f64>::standard_normal(6, &mut rng).as_slice().to_vec(),
            )
            .unwrap();
            let lhs = j.inertia_apply(&a).pairing(&b);
            let rhs = a.pairing(&j.inertia_apply(&b));
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12 * (1.0 + lhs.abs()));
            assert!(j.inertia_apply(&a).pairing(&a) > 0.0);
        }
    }

    #[test]
    fn classification_examples() {
        assert_eq!(
            jt(&[1.0, 2.0, 3.0]).classify_symmetry(1e-9),
            SymmetryClass::Generic
        );
        assert_eq!(
            jt(&[1.0, 2.0, 2.0]).classify_symmetry(1e-9),
            SymmetryClass::Axisymmetric { axis: 0 }
        );
        assert_eq!(
            jt(&[1.0, 1.0, 2.0]).classify_symmetry(1e-9),
            SymmetryClass::Axisymmetric { axis: 2 }
        );
        assert_eq!(
            jt(&[1.0, 1.0, 2.0, 2.0]).classify_symmetry(1e-9),
            SymmetryClass::Cylindrical { r: 2, r_prime: 2 }
        );
        assert_eq!(
            jt(&[2.0, 2.0, 2.0, 1.0, 1.0]).classify_symmetry(1e-9),
            SymmetryClass::Cylindrical { r: 2, r_prime: 3 }
        );
        assert_eq!(
            jt(&[1.0, 1.0, 1.0]).classify_symmetry(1e-9),
            SymmetryClass::OtherMultiplicity {
                groups: vec![vec![0, 1, 2]]
            }
        );
        // near-equal entries group under the relative tolerance
        assert_eq!(
            jt(&[1.0, 1.0 + 1e-12, 2.0]).classify_symmetry(1e-9),
            SymmetryClass::Axisymmetric { axis: 2 }
        );
        // three distinct groups
        assert_eq!(
            jt(&[1.0, 1.0, 2.0, 2.0, 3.0]).classify_symmetry(1e-9),
            SymmetryClass::OtherMultiplicity {
                groups: vec![vec![0, 1], vec![2, 3], vec![4]]
            }
        );
    }

    #[test]
    fn extremal_plane_examples() {
        let (min, max) = jt(&[1.0, 2.0, 3.0]).extremal_planes();
        assert_eq!(min.len(), 1);
        assert_eq!(min[0].axes, (0, 1));
        assert_eq!(min[0].moment, 3.0);
        assert_eq!(max.len(), 1);
        assert_eq!(max[0].axes, (1, 2));
        assert_eq!(max[0].moment, 5.0);

        let (min, max) = jt(&[1.0, 1.0, 1.0]).extremal_planes();
        assert_eq!(min.len(), 3);
        assert_eq!(max.len(), 3);

        let (min, max) = jt(&[1.0, 2.0, 2.0]).extremal_planes();
        let min_axes: Vec<_> = min.iter().map(|p| p.axes).collect();
        assert_eq!(min_axes, vec![(0, 1), (0, 2)]); // axial planes, moment 3
        assert_eq!(max.len(), 1);
        assert_eq!(max[0].axes, (1, 2)); // equatorial plane, moment 4
        assert_eq!(max[0].moment, 4.0);
    }

    #[test]
    fn fj_matrix_n3_closed_form() {
        let j = jt(&[1.0, 2.0, 3.0]);
        let a = j.fj_matrix().unwrap();
        assert_abs_diff_eq!(a[0], 1.549193, epsilon = 1e-6);
        assert_abs_diff_eq!(a[1], 1.936492, epsilon = 1e-6);
        assert_abs_diff_eq!(a[2], 2.581989, epsilon = 1e-6);
        // A_i A_j = J_i + J_j
        assert_abs_diff_eq!(a[0] * a[1], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a[0] * a[2], 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a[1] * a[2], 5.0, epsilon = 1e-12);
    }

    #[test]
    fn fj_matrix_axisymmetric_and_infeasible() {
        let j = jt(&[1.0, 2.0, 2.0, 2.0]);
        let a = j.fj_matrix().unwrap();
        assert_abs_diff_eq!(a[0], 1.5, epsilon = 1e-14);
        for i in 1..4 {
            assert_abs_diff_eq!(a[i], 2.0, epsilon = 1e-14);
        }
        // moment reconstruction: J_1 = A_1A_2 − ½A_2², J_2 = ½A_2²
        assert_abs_diff_eq!(a[0] * a[1] - 0.5 * a[1] * a[1], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(0.5 * a[1] * a[1], 2.0, epsilon = 1e-13);

        assert!(matches!(
            jt(&[1.0, 2.0, 3.0, 4.0]).fj_matrix(),
            Err(Error::Infeasible)
        ));
        // cylindrical is also infeasible for n ≥ 4
        assert!(matches!(
            jt(&[1.0, 1.0, 2.0, 2.0]).fj_matrix(),
            Err(Error::Infeasible)
        ));
        // the isotropic limit is feasible with A = √(2J)·Id
        let iso = jt(&[2.0, 2.0, 2.0, 2.0]);
        let a = iso.fj_matrix().unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(a[i], 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn fj_residual_zero_when_feasible_and_large_otherwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        // axisymmetric n=4 with the closed-form A
        let j = jt(&[1.0, 2.0, 2.0, 2.0]);
        let a = j.fj_matrix().unwrap();
        assert!(j.fj_condition_residual(&a, 100, &mut rng) < 1e-12);
        // n=3 closed form
        let j3 = jt(&[1.0, 2.0, 3.0]);
        let a3 = j3.fj_matrix().unwrap();
        assert!(j3.fj_condition_residual(&a3, 100, &mut rng) < 1e-12);
        // infeasible body: even the least-squares candidate has a residual
        // bounded away from zero
        let j4 = jt(&[1.0, 2.0, 3.0, 4.0]);
        let lsq = j4.fj_least_squares().unwrap();
        let res = j4.fj_condition_residual(&lsq, 100, &mut rng);
        assert!(res > 0.1, "expected residual > 0.1, got {res}");
    }

    #[test]
    fn rank2_witness_values() {
        assert_abs_diff_eq!(
            jt(&[1.0, 2.0, 3.0, 4.0]).rank2_preservation_witness().unwrap(),
            16.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            jt(&[1.0, 2.0, 1.0, 2.0]).rank2_preservation_witness().unwrap(),
            0.0,
            epsilon = 1e-12
        );
        // the witness is evaluated at the stated index choice; for the
        // cylindrical ordering (1,1,2,2) that choice has J_1≠J_3, J_2≠J_4
        // and the block determinant is (1−2)²(1−2)² = 1
        assert_abs_diff_eq!(
            jt(&[1.0, 1.0, 2.0, 2.0]).rank2_preservation_witness().unwrap(),
            1.0,
            epsilon = 1e-12
        );
        // extra dimensions beyond the 4×4 block do not matter
        assert_abs_diff_eq!(
            jt(&[1.0, 2.0, 3.0, 4.0, 17.0])
                .rank2_preservation_witness()
                .unwrap(),
            16.0,
            epsilon = 1e-11
        );
        assert!(matches!(
            jt(&[1.0, 2.0, 3.0]).rank2_preservation_witness(),
            Err(Error::DimensionTooSmall { .. })
        ));
    }

    #[test]
    fn random_symmetry_element_commutes_with_mass_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for diag in [
            vec![1.0, 2.0, 2.0],
            vec![1.0, 1.0, 2.0, 2.0],
            vec![1.0, 2.0, 3.0, 4.0],
            vec![3.0, 3.0, 3.0, 1.0, 2.0],
        ] {
            let j = jt(&diag);
            let n = j.dim();
            let g = j.random_symmetry_element(1e-9, &mut rng);
            assert!(g.orthogonality_error() < 1e-12);
            // g 𝕁 gᵀ = 𝕁
            let jd = SquareMatrix::from_fn(n, |i, k| if i == k { diag[i] } else { 0.0 });
            let conj = g.matrix().mul(&jd).mul(&g.matrix().transpose());
            assert!(conj.sub(&jd).frobenius_norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn witness_matches_closed_form(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 4 + (seed % 3) as usize;
            let diag: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..5.0)).collect();
            let j = MassTensor::<f64>::try_new(diag.clone()).unwrap();
            let w = j.rank2_preservation_witness().unwrap();
            let expect = (diag[0] - diag[2]).powi(2) * (diag[1] - diag[3]).powi(2);
            prop_assert!((w - expect).abs() <= 1e-10 * (1.0 + expect));
        }

        #[test]
        fn classification_is_permutation_invariant(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // build a multiset with a random multiplicity pattern
            let values = [1.0f64, 2.5, 4.0];
            let n = 3 + (seed % 4) as usize;
            let mut diag: Vec<f64> = (0..n)
                .map(|_| values[rng.random_range(0..3usize)])
                .collect();
            // ensure validity (n ≥ 3 guaranteed); classify original
            let class_a = MassTensor::<f64>::try_new(diag.clone())
                .unwrap()
                .classify_symmetry(1e-9);
            // random permutation via sort by random keys
            let mut keyed: Vec<(u32, f64)> =
                diag.drain(..).map(|v| (rng.next_u32(), v)).collect();
            keyed.sort_by_key(|&(k, _)| k);
            let permuted: Vec<f64> = keyed.into_iter().map(|(_, v)| v).collect();
            let class_b = MassTensor::<f64>::try_new(permuted)
                .unwrap()
                .classify_symmetry(1e-9);
            // classes agree up to the index payload: compare multiplicity patterns
            let sig = |c: &SymmetryClass| match c {
                SymmetryClass::Generic => vec![1usize; n],
                SymmetryClass::Axisymmetric { .. } => {
                    let mut v = vec![n - 1, 1];
                    v.sort_unstable();
                    v
                }
                SymmetryClass::Cylindrical { r, r_prime } => {
                    let mut v = vec![*r, *r_prime];
                    v.sort_unstable();
                    v
                }
                SymmetryClass::OtherMultiplicity { groups } => {
                    let mut v: Vec<usize> = groups.iter().map(|g| g.len()).collect();
                    v.sort_unstable();
                    v
                }
            };
            prop_assert_eq!(sig(&class_a), sig(&class_b));
        }

        #[test]
        fn fj_feasibility_matches_symmetry_class(seed in 0u64..100) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 4 + (seed % 3) as usize;
            // half the time axisymmetric, half the time generic
            let diag: Vec<f64> = if seed % 2 == 0 {
                let j1 = rng.random_range(0.3..3.0);
                let j2 = rng.random_range(0.3..3.0);
                let axis = rng.random_range(0..n);
                (0..n).map(|i| if i == axis { j1 } else { j2 }).collect()
            } else {
                (0..n).map(|i| 1.0 + i as f64 * 0.7 + rng.random_range(0.0..0.1)).collect()
            };
            let j = MassTensor::<f64>::try_new(diag).unwrap();
            let feasible = j.fj_matrix().is_ok();
            let axi = match j.classify_symmetry(1e-9) {
                SymmetryClass::Axisymmetric { .. } => true,
                // isotropic limit
                SymmetryClass::OtherMultiplicity { groups } => groups.len() == 1,
                _ => false,
            };
            prop_assert_eq!(feasible, axi);
            if let Ok(a) = j.fj_matrix() {
                let res = j.fj_condition_residual(&a, 20, &mut rng);
                prop_assert!(res < 1e-10, "residual {}", res);
            }
        }
    }
}
