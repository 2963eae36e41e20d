//! Stability of steady rotations via the energy–momentum (Casimir)
//! criterion.
//!
//! For a steady rotation in the principal plane `(i, j)` with angular
//! speed `ω`, the test function
//!
//! ```text
//! f(q, p) = H − λ‖p‖² − (‖p‖² − c)²,   λ = 1/(2(J_i+J_j)),   c = ω²(J_i+J_j)²
//! ```
//!
//! has a critical point at the rotation, and its Hessian restricted to a
//! transverse slice is diagonal in an adapted basis:
//!
//! * a leading scalar `−8ω²(J_i+J_j)²` along the momentum-magnitude
//!   direction, and
//! * one 2×2 block `diag(J_i−J_k, J_j−J_k)` for every axis `k ∉ {i, j}`.
//!
//! When all non-degenerate entries share a strict sign the rotation is a
//! conditional extremum of `f` (for the all-positive case, of `−f` with
//! the penalty sign flipped) and hence Lyapunov stable. Entries that
//! vanish because `J_k` equals `J_i` or `J_j` are symmetry-group
//! directions and are quotiented out. The criterion is one-directional:
//! a sign-indefinite Hessian yields no verdict.

use crate::body::{MassTensor, PrincipalPlane};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::reduced::hamiltonian_raw;
use crate::scalar::Real;

/// Outcome of the extremum test. There is no `Unstable` variant: the
/// criterion only certifies stability.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilityVerdict {
    Stable,
    NotDeterminedByThisCriterion,
}

/// One 2×2 transverse block `diag(J_i−J_k, J_j−J_k)` for an axis `k`
/// outside the rotation plane. `group_direction` flags entries that are
/// zero because the corresponding moments coincide (within the
/// eigenvalue-grouping tolerance); those directions generate symmetries
/// and do not obstruct stability.
#[derive(Clone, Debug)]
pub struct StabilityBlock<T> {
    pub axis: usize,
    pub entries: (T, T),
    pub group_direction: (bool, bool),
}

/// Closed-form restricted Hessian of the stability test function at a
/// steady rotation, with the derived verdict.
#[derive(Clone, Debug)]
pub struct StabilityHessian<T> {
    pub plane: (usize, usize),
    pub omega: T,
    /// `−8ω²(J_i+J_j)²`, the momentum-magnitude direction.
    pub leading: T,
    /// Blocks for every `k ∉ {i, j}`, ascending in `k`.
    pub blocks: Vec<StabilityBlock<T>>,
    pub verdict: StabilityVerdict,
}

impl<T: Real> StabilityHessian<T> {
    /// The diagonal entries in the adapted-basis order: leading entry,
    /// then for each block its two entries. Length `2n−3`.
    pub fn diagonal(&self) -> Vec<T> {
        let mut d = Vec::with_capacity(1 + 2 * self.blocks.len());
        d.push(self.leading);
        for b in &self.blocks {
            d.push(b.entries.0);
            d.push(b.entries.1);
        }
        d
    }
}

fn check_plane<T: Real>(j: &MassTensor<T>, plane: &PrincipalPlane<T>, omega: T) -> Result<()> {
    let n = j.dim();
    let (i, jj) = plane.axes;
    if i >= n || jj >= n || i == jj {
        return Err(Error::DimensionMismatch {
            context: "principal plane axes",
            expected: n,
            got: i.max(jj),
        });
    }
    if omega == T::zero() || !omega.is_finite() {
        return Err(Error::InvalidState {
            context: "steady rotation stability",
            what: "angular speed",
            value: omega.to_f64().unwrap_or(f64::NAN),
            tol: 0.0,
        });
    }
    Ok(())
}

/// Closed-form restricted Hessian and stability verdict for the steady
/// rotation in `plane` at angular speed `omega`. Group directions are
/// identified from the eigenvalue grouping of the mass tensor at
/// tolerance `eigen_tol`.
pub fn stability_hessian<T: Real>(
    j: &MassTensor<T>,
    plane: &PrincipalPlane<T>,
    omega: T,
    eigen_tol: T,
) -> Result<StabilityHessian<T>> {
    check_plane(j, plane, omega)?;
    let (i, jj) = plane.axes;
    let n = j.dim();
    let groups = j.eigen_groups(eigen_tol);
    let group_of = |axis: usize| -> usize {
        groups
            .iter()
            .position(|g| g.contains(&axis))
            .expect("every axis belongs to an eigenvalue group")
    };
    let (gi, gj) = (group_of(i), group_of(jj));
    let pm = j.moment(i) + j.moment(jj);
    let leading = -T::lit(8.0) * omega * omega * pm * pm;
    let mut blocks = Vec::new();
    let mut any_pos = false;
    let mut any_neg = false;
    for k in 0..n {
        if k == i || k == jj {
            continue;
        }
        let gk = group_of(k);
        let e1 = j.moment(i) - j.moment(k);
        let e2 = j.moment(jj) - j.moment(k);
        let grp = (gk == gi, gk == gj);
        if !grp.0 {
            if e1 > T::zero() {
                any_pos = true;
            } else if e1 < T::zero() {
                any_neg = true;
            }
        }
        if !grp.1 {
            if e2 > T::zero() {
                any_pos = true;
            } else if e2 < T::zero() {
                any_neg = true;
            }
        }
        blocks.push(StabilityBlock {
            axis: k,
            entries: (e1, e2),
            group_direction: grp,
        });
    }
    // All strictly negative entries: f has a conditional maximum.
    // All strictly positive: the penalty sign is flipped and −f has one.
    // Only group directions left: stable by the degenerate cases.
    let verdict = if any_pos && any_neg {
        StabilityVerdict::NotDeterminedByThisCriterion
    } else {
        StabilityVerdict::Stable
    };
    Ok(StabilityHessian {
        plane: (i, jj),
        omega,
        leading,
        blocks,
        verdict,
    })
}

/// The test function `f = H − λ‖p‖² − (‖p‖² − c)²` evaluated after
/// retracting the ambient displacement onto the bundle: `q` is
/// renormalized and `p` is projected tangent to the sphere.
fn retracted_test_function<T: Real>(
    j: &MassTensor<T>,
    lambda: T,
    c: T,
    q_raw: &Vector<T>,
    p_raw: &Vector<T>,
) -> Result<T> {
    let q = q_raw.normalized()?;
    let mut p = p_raw.clone();
    p.project_off_unit(&q);
    let h = hamiltonian_raw(j, &q, &p);
    let p_sq = p.norm_sq();
    Ok(h - lambda * p_sq - (p_sq - c) * (p_sq - c))
}

/// The adapted transverse directions at the phase-zero steady rotation
/// `(q₀, p₀) = (f_i, ω(J_i+J_j) f_j)`: first `(0, f_j)`, then for every
/// `k ∉ {i, j}` the pair `(f_k/ω, 0)` and `(0, √((J_i+J_j)(J_i+J_k)) f_k)`.
fn adapted_directions<T: Real>(
    j: &MassTensor<T>,
    plane: &PrincipalPlane<T>,
    omega: T,
) -> Vec<(Vector<T>, Vector<T>)> {
    let n = j.dim();
    let (i, jj) = plane.axes;
    let zero = Vector::zeros(n);
    let mut dirs = vec![(zero.clone(), Vector::basis(n, jj))];
    let pm = j.moment(i) + j.moment(jj);
    for k in 0..n {
        if k == i || k == jj {
            continue;
        }
        dirs.push((Vector::basis(n, k).scale(T::one() / omega), zero.clone()));
        let s = (pm * (j.moment(i) + j.moment(k))).sqrt();
        dirs.push((zero.clone(), Vector::basis(n, k).scale(s)));
    }
    dirs
}

/// Finite-difference diagonal of the restricted Hessian in the adapted
/// basis, Richardson-extrapolated from centered second differences at
/// steps `h` and `h/2`. The order matches [`StabilityHessian::diagonal`].
pub fn stability_hessian_fd<T: Real>(
    j: &MassTensor<T>,
    plane: &PrincipalPlane<T>,
    omega: T,
    h: T,
) -> Result<Vec<T>> {
    check_plane(j, plane, omega)?;
    let n = j.dim();
    let (i, jj) = plane.axes;
    let pm = j.moment(i) + j.moment(jj);
    let lambda = T::one() / (T::lit(2.0) * pm);
    let c = omega * omega * pm * pm;
    let q0 = Vector::<T>::basis(n, i);
    let p0 = Vector::<T>::basis(n, jj).scale(omega * pm);
    let f0 = retracted_test_function(j, lambda, c, &q0, &p0)?;
    let second = |dq: &Vector<T>, dp: &Vector<T>, step: T| -> Result<T> {
        let mut qp = q0.clone();
        qp.axpy(step, dq);
        let mut pp = p0.clone();
        pp.axpy(step, dp);
        let fp = retracted_test_function(j, lambda, c, &qp, &pp)?;
        let mut qm = q0.clone();
        qm.axpy(-step, dq);
        let mut pm_ = p0.clone();
        pm_.axpy(-step, dp);
        let fm = retracted_test_function(j, lambda, c, &qm, &pm_)?;
        Ok((fp - T::lit(2.0) * f0 + fm) / (step * step))
    };
    let mut out = Vec::new();
    for (dq, dp) in adapted_directions(j, plane, omega) {
        let coarse = second(&dq, &dp, h)?;
        let fine = second(&dq, &dp, h * T::lit(0.5))?;
        out.push((T::lit(4.0) * fine - coarse) / T::lit(3.0));
    }
    Ok(out)
}
