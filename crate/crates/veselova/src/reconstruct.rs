//! Rebuilding full attitudes from reduced data and confining symmetric
//! bodies to small blocks.
//!
//! Four pieces live here:
//! * the 3D reconstruction, which rebuilds the attitude over a reduced
//!   trajectory from the orthonormal frame `(q, p/|p|, q×p/|p|)`;
//! * block embeddings for axisymmetric / cylindrically symmetric mass
//!   tensors, producing body- and space-side orthogonal changes of basis
//!   that confine the n-dimensional dynamics to a leading 3D / 4D block;
//! * the explicit three-frequency relative-equilibrium solution of the 4D
//!   body diag[J₁, J₁, J₂, J₂];
//! * the trace of the body's symmetry axis on the unit sphere, together
//!   with the invariant cylinder it sweeps.

use crate::body::{default_eigen_tol, MassTensor, SymmetryClass};
use crate::cylindrical::{cyl_equilibrium, CylPoint};
use crate::error::{Error, Result};
use crate::full::FullState;
use crate::linalg::{
    orthonormal_completion, orthonormalize, OrthogonalMatrix, SquareMatrix, Vector,
};
use crate::reduced::{vector_field_raw, ReducedState};
use crate::scalar::Real;
use crate::skew::SkewMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Minimum momentum norm below which reconstruction refuses to divide.
pub fn momentum_tol<T: Real>() -> T {
    T::lit(1e-10)
}

/// Cross product in ℝ³.
fn cross3<T: Real>(a: &Vector<T>, b: &Vector<T>) -> Vector<T> {
    Vector::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

/// Assembles a square matrix whose `j`-th column is `cols[j]`.
fn matrix_from_columns<T: Real>(cols: &[Vector<T>]) -> SquareMatrix<T> {
    SquareMatrix::from_fn(cols.len(), |i, j| cols[j][i])
}

// ---------------------------------------------------------------------------
// 3D reconstruction
// ---------------------------------------------------------------------------

/// Checks that a gauge attitude fixes the distinguished spatial axis
/// (first row = e₁), so that left-multiplying by it maps solutions of the
/// full system to solutions.
fn check_axis_stabilizer<T: Real>(g0: &OrthogonalMatrix<T>) -> Result<()> {
    let n = g0.dim();
    let m = g0.matrix();
    let mut defect = (m[(0, 0)] - T::one()).abs();
    for j in 1..n {
        defect = defect.max(m[(0, j)].abs());
    }
    if defect > T::lit(1e-10) {
        return Err(Error::InvalidState {
            context: "reconstruction gauge",
            what: "deviation of the first row of g0 from e1",
            value: defect.to_f64().unwrap_or(f64::NAN),
            tol: 1e-10,
        });
    }
    Ok(())
}

/// Rebuilds full 3D states over a reduced trajectory: the attitude is the
/// rotation with rows `qᵀ`, `pᵀ/|p|`, `(q×p)ᵀ/|p|` premultiplied by the
/// gauge `g0` (which must fix the distinguished axis), and the velocity is
/// `Ω = q∧q̇` with `q̇` taken from the reduced field. The result is a
/// solution of the full constrained system whenever the input solves the
/// reduced one.
pub fn reconstruct_3d<T: Real>(
    j: &MassTensor<T>,
    states: &[ReducedState<T>],
    g0: &OrthogonalMatrix<T>,
) -> Result<Vec<FullState<T>>> {
    if g0.dim() != 3 {
        return Err(Error::DimensionMismatch {
            context: "3D reconstruction gauge",
            expected: 3,
            got: g0.dim(),
        });
    }
    check_axis_stabilizer(g0)?;
    let mut out = Vec::with_capacity(states.len());
    for s in states {
        if s.dim() != 3 {
            return Err(Error::DimensionMismatch {
                context: "3D reconstruction",
                expected: 3,
                got: s.dim(),
            });
        }
        let q = s.q();
        let p = s.p();
        let p_norm = p.norm();
        if p_norm < momentum_tol::<T>() {
            return Err(Error::ZeroMomentum {
                norm: p_norm.to_f64().unwrap_or(f64::NAN),
                tol: momentum_tol::<T>().to_f64().unwrap_or(1e-10),
            });
        }
        let inv = T::one() / p_norm;
        let rows = [q.clone(), p.scale(inv), cross3(q, p).scale(inv)];
        let frame = SquareMatrix::from_rows(&rows);
        let g = OrthogonalMatrix::new(g0.matrix().mul(&frame))?;
        let (qdot, _) = vector_field_raw(j, q, p);
        let omega = SkewMatrix::wedge(q, &qdot);
        out.push(FullState::try_new(g, omega)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Axis trace
// ---------------------------------------------------------------------------

/// The body's symmetry axis seen from space: unit samples of `g f₁`.
#[derive(Clone, Debug)]
pub struct AxisTrace<T> {
    samples: Vec<Vector<T>>,
}

impl<T: Real> AxisTrace<T> {
    /// Admits samples after checking each norm is 1 within 1e-10.
    pub fn try_new(samples: Vec<Vector<T>>) -> Result<Self> {
        for v in &samples {
            let err = (v.norm() - T::one()).abs();
            if err > T::lit(1e-10) {
                return Err(Error::InvalidState {
                    context: "axis trace",
                    what: "sample norm deviation from 1",
                    value: err.to_f64().unwrap_or(f64::NAN),
                    tol: 1e-10,
                });
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[Vector<T>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Samples the spatial position of the body's first axis, `g f₁` (the
/// first column of the attitude), along a reconstructed 3D trajectory.
pub fn axis_trace<T: Real>(states: &[FullState<T>]) -> Result<AxisTrace<T>> {
    let mut samples = Vec::with_capacity(states.len());
    for s in states {
        if s.dim() != 3 {
            return Err(Error::DimensionMismatch {
                context: "axis trace",
                expected: 3,
                got: s.dim(),
            });
        }
        samples.push(s.g().col(0));
    }
    AxisTrace::try_new(samples)
}

/// Computes the axis trace directly from reduced samples via
/// `x = (q₁, p₁/√P, ±√(1 − q₁² − p₁²/P))`, resolving the sign of the third
/// component by continuity: each sample takes the branch closer to the
/// previous sample's value, and the first sample takes the nonnegative
/// branch.
pub fn axis_trace_from_reduced<T: Real>(states: &[ReducedState<T>]) -> Result<AxisTrace<T>> {
    let mut samples = Vec::with_capacity(states.len());
    let mut prev: Option<T> = None;
    for s in states {
        if s.dim() != 3 {
            return Err(Error::DimensionMismatch {
                context: "axis trace from reduced data",
                expected: 3,
                got: s.dim(),
            });
        }
        let p_norm = s.p().norm();
        if p_norm < momentum_tol::<T>() {
            return Err(Error::ZeroMomentum {
                norm: p_norm.to_f64().unwrap_or(f64::NAN),
                tol: momentum_tol::<T>().to_f64().unwrap_or(1e-10),
            });
        }
        let x1 = s.q()[0];
        let x2 = s.p()[0] / p_norm;
        let mag = (T::one() - x1 * x1 - x2 * x2).max(T::zero()).sqrt();
        let x3 = match prev {
            None => mag,
            Some(prev_x3) => {
                if (mag - prev_x3).abs() <= (-mag - prev_x3).abs() {
                    mag
                } else {
                    -mag
                }
            }
        };
        prev = Some(x3);
        samples.push(Vector::from_vec(vec![x1, x2, x3]));
    }
    AxisTrace::try_new(samples)
}

/// Signed residual of the invariant cylinder swept by the axis trace of
/// the 3D axisymmetric body at energy `h` and momentum level `P`:
/// `x₁² + (P/(2H(J₁+J₂)))·x₂² − (4HJ₂−P)/(2H(J₂−J₁))`.
pub fn axis_cylinder_residual<T: Real>(j1: T, j2: T, h: T, p_sq: T, sample: &Vector<T>) -> T {
    let two = T::lit(2.0);
    let x1 = sample[0];
    let x2 = sample[1];
    x1 * x1 + p_sq / (two * h * (j1 + j2)) * x2 * x2
        - (T::lit(4.0) * h * j2 - p_sq) / (two * h * (j2 - j1))
}

// ---------------------------------------------------------------------------
// Block embeddings
// ---------------------------------------------------------------------------

/// Orthonormal basis of the coordinate subspace `span{e_i : i ∈ indices}`
/// whose leading vectors align with the restrictions of `q` and then `p`
/// (each skipped when its independent component vanishes, in which case
/// the data simply occupies fewer leading slots). The remainder is
/// completed from the coordinate axes, or — when `randomize` — from
/// Gaussian directions inside the subspace, with the axes as a fallback.
fn eigen_block_basis<T: Real, R: Rng + ?Sized>(
    q: &Vector<T>,
    p: &Vector<T>,
    indices: &[usize],
    rng: &mut R,
    randomize: bool,
) -> Vec<Vector<T>> {
    let n = q.dim();
    let restrict = |v: &Vector<T>| {
        let mut out = Vector::zeros(n);
        for &i in indices {
            out[i] = v[i];
        }
        out
    };
    let mut cands = vec![restrict(q), restrict(p)];
    if randomize {
        for _ in 0..indices.len() {
            cands.push(restrict(&Vector::standard_normal(n, rng)));
        }
    }
    for &i in indices {
        cands.push(Vector::basis(n, i));
    }
    orthonormalize(&cands, indices.len(), T::lit(1e-8))
        .expect("coordinate axes span their own subspace")
}

/// An orthogonal change of body frame confining the dynamics of a
/// symmetric body to a leading coordinate block. Columns of `p_body` are
/// the new frame vectors; the transformed mass tensor is the diagonal
/// `mass_diag` (grouped by block, not sorted).
#[derive(Clone, Debug)]
pub struct BlockEmbedding<T> {
    p_body: OrthogonalMatrix<T>,
    block: usize,
    mass_diag: Vec<T>,
}

/// Body-frame embedding for an axisymmetric mass tensor (one distinguished
/// axis with moment J₁, the rest sharing J₂): the transformed reduced data
/// occupies the leading three coordinates, where the dynamics is that of
/// the 3D body diag[J₁, J₂, J₂]. Uses the deterministic coordinate-axis
/// completion.
pub fn embed_axisymmetric<T: Real>(
    j: &MassTensor<T>,
    s: &ReducedState<T>,
) -> Result<BlockEmbedding<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    embed_axisymmetric_with(j, s, &mut rng, false)
}

/// As [`embed_axisymmetric`], with the completion of the basis inside the
/// degenerate eigenspace drawn from `rng` when `randomize` is set. Any
/// completion yields a valid embedding; the randomized variant exists to
/// check that downstream conclusions do not depend on the choice.
pub fn embed_axisymmetric_with<T: Real, R: Rng + ?Sized>(
    j: &MassTensor<T>,
    s: &ReducedState<T>,
    rng: &mut R,
    randomize: bool,
) -> Result<BlockEmbedding<T>> {
    let n = j.dim();
    if s.dim() != n {
        return Err(Error::DimensionMismatch {
            context: "axisymmetric embedding",
            expected: n,
            got: s.dim(),
        });
    }
    if n <= 3 {
        return Err(Error::DimensionTooSmall {
            context: "axisymmetric embedding",
            min: 4,
            got: n,
        });
    }
    let axis = match j.classify_symmetry(default_eigen_tol::<T>()) {
        SymmetryClass::Axisymmetric { axis } => axis,
        _ => {
            return Err(Error::SymmetryMismatch {
                context: "axisymmetric embedding",
                needed: "moment multiplicities {1, n−1}",
            })
        }
    };
    let tail: Vec<usize> = (0..n).filter(|&i| i != axis).collect();
    let b2 = eigen_block_basis(s.q(), s.p(), &tail, rng, randomize);
    let mut cols = Vec::with_capacity(n);
    cols.push(Vector::basis(n, axis));
    cols.extend(b2);
    let p_body = OrthogonalMatrix::new(matrix_from_columns(&cols))?;
    let j1 = j.moment(axis);
    let j2 = j.moment(tail[0]);
    let mut mass_diag = vec![j1];
    mass_diag.extend(core::iter::repeat(j2).take(n - 1));
    Ok(BlockEmbedding {
        p_body,
        block: 3,
        mass_diag,
    })
}

/// Body-frame embedding for a cylindrical mass tensor (moments J₁ with
/// multiplicity r, J₂ with multiplicity n−r, both ≥ 2): the transformed
/// reduced data occupies the leading four coordinates, where the dynamics
/// is that of the 4D body diag[J₁, J₁, J₂, J₂]. The change of basis
/// regroups eigenvectors across the two eigenspaces, so the transformed
/// full mass diagonal is [J₁, J₁, J₂, J₂, J₁…, J₂…] (not sorted).
pub fn embed_cylindrical<T: Real>(
    j: &MassTensor<T>,
    s: &ReducedState<T>,
) -> Result<BlockEmbedding<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    embed_cylindrical_with(j, s, &mut rng, false)
}

/// As [`embed_cylindrical`], with randomized eigenspace completions.
pub fn embed_cylindrical_with<T: Real, R: Rng + ?Sized>(
    j: &MassTensor<T>,
    s: &ReducedState<T>,
    rng: &mut R,
    randomize: bool,
) -> Result<BlockEmbedding<T>> {
    let n = j.dim();
    if s.dim() != n {
        return Err(Error::DimensionMismatch {
            context: "cylindrical embedding",
            expected: n,
            got: s.dim(),
        });
    }
    if n <= 4 {
        return Err(Error::DimensionTooSmall {
            context: "cylindrical embedding",
            min: 5,
            got: n,
        });
    }
    let groups = j.eigen_groups(default_eigen_tol::<T>());
    if groups.len() != 2 || groups[0].len() < 2 || groups[1].len() < 2 {
        return Err(Error::SymmetryMismatch {
            context: "cylindrical embedding",
            needed: "moment multiplicities {r, n−r} with r ≥ 2",
        });
    }
    let b1 = eigen_block_basis(s.q(), s.p(), &groups[0], rng, randomize);
    let b2 = eigen_block_basis(s.q(), s.p(), &groups[1], rng, randomize);
    let j1 = j.moment(groups[0][0]);
    let j2 = j.moment(groups[1][0]);
    let mut cols = Vec::with_capacity(n);
    cols.push(b1[0].clone());
    cols.push(b1[1].clone());
    cols.push(b2[0].clone());
    cols.push(b2[1].clone());
    cols.extend(b1[2..].iter().cloned());
    cols.extend(b2[2..].iter().cloned());
    let p_body = OrthogonalMatrix::new(matrix_from_columns(&cols))?;
    let mut mass_diag = vec![j1, j1, j2, j2];
    mass_diag.extend(core::iter::repeat(j1).take(groups[0].len() - 2));
    mass_diag.extend(core::iter::repeat(j2).take(groups[1].len() - 2));
    Ok(BlockEmbedding {
        p_body,
        block: 4,
        mass_diag,
    })
}

impl<T: Real> BlockEmbedding<T> {
    /// Body-side change of basis (columns = new frame vectors).
    pub fn p_body(&self) -> &OrthogonalMatrix<T> {
        &self.p_body
    }

    /// Size of the leading invariant block (3 axisymmetric, 4 cylindrical).
    pub fn block(&self) -> usize {
        self.block
    }

    /// Transformed mass diagonal over the full dimension.
    pub fn mass_diag(&self) -> &[T] {
        &self.mass_diag
    }

    /// Transformed mass tensor on the full space.
    pub fn full_mass(&self) -> Result<MassTensor<T>> {
        MassTensor::try_new(self.mass_diag.clone())
    }

    /// Mass tensor of the block subproblem.
    pub fn sub_mass(&self) -> Result<MassTensor<T>> {
        MassTensor::try_new(self.mass_diag[..self.block].to_vec())
    }

    /// Reduced state in the new body frame: `(P_bᵀ q, P_bᵀ p)`; for data
    /// the embedding was built from, supported in the leading block.
    pub fn transform_reduced(&self, s: &ReducedState<T>) -> Result<ReducedState<T>> {
        let pt = self.p_body.transpose();
        ReducedState::try_new(pt.matvec(s.q()), pt.matvec(s.p()))
    }

    /// Largest transformed component of `(q, p)` beyond the leading block.
    pub fn reduced_leakage(&self, s: &ReducedState<T>) -> T {
        let pt = self.p_body.transpose();
        let qt = pt.matvec(s.q());
        let ptv = pt.matvec(s.p());
        let mut worst = T::zero();
        for k in self.block..qt.dim() {
            worst = worst.max(qt[k].abs()).max(ptv[k].abs());
        }
        worst
    }

    /// Restriction of a block-confined state to the block subproblem.
    pub fn restrict_reduced(&self, s: &ReducedState<T>) -> Result<ReducedState<T>> {
        let full = self.transform_reduced(s)?;
        let (qh, _) = full.q().split(self.block);
        let (ph, _) = full.p().split(self.block);
        ReducedState::try_new(qh, ph)
    }

    /// Space-side change of basis `P_s` for the initial attitude `g0`: the
    /// first column is e₁, the trailing `n − block` columns are the
    /// trailing columns of `g0·P_b` (forced, so that `P_sᵀ g0 P_b` is
    /// exactly block-diagonal with identity tail), and the remaining
    /// leading columns are an orthonormal completion. Deterministic
    /// coordinate-axis completion.
    pub fn space_basis(&self, g0: &OrthogonalMatrix<T>) -> Result<OrthogonalMatrix<T>> {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        self.space_basis_with(g0, &mut rng, false)
    }

    /// As [`Self::space_basis`] with an optional randomized completion.
    pub fn space_basis_with<R: Rng + ?Sized>(
        &self,
        g0: &OrthogonalMatrix<T>,
        rng: &mut R,
        randomize: bool,
    ) -> Result<OrthogonalMatrix<T>> {
        let n = self.p_body.dim();
        if g0.dim() != n {
            return Err(Error::DimensionMismatch {
                context: "space-side basis",
                expected: n,
                got: g0.dim(),
            });
        }
        let gpb = g0.matrix().mul(self.p_body.matrix());
        // e₁ is orthogonal to the forced trailing columns exactly when the
        // contact direction of g0 is block-confined in the new body frame.
        let mut start = vec![Vector::basis(n, 0)];
        for k in self.block..n {
            start.push(gpb.col(k));
        }
        let target = start.len();
        let lead = orthonormalize(&start, target, T::lit(1e-6)).ok_or({
            Error::DegenerateConfiguration {
                context: "space-side basis: the attitude is not block-confined",
                residual: 1e-6,
            }
        })?;
        let full = if randomize {
            let mut cands = lead.clone();
            for _ in 0..n {
                cands.push(Vector::standard_normal(n, rng));
            }
            for i in 0..n {
                cands.push(Vector::basis(n, i));
            }
            orthonormalize(&cands, n, T::lit(1e-6))
                .unwrap_or_else(|| orthonormal_completion(&lead, n, rng))
        } else {
            orthonormal_completion(&lead, n, rng)
        };
        let w_count = n - self.block;
        let mut cols = Vec::with_capacity(n);
        cols.push(full[0].clone());
        cols.extend(full[1 + w_count..].iter().cloned());
        cols.extend(full[1..1 + w_count].iter().cloned());
        OrthogonalMatrix::new(matrix_from_columns(&cols))
    }

    /// Full state in the new frames: `g̃ = P_sᵀ g P_b`, `Ω̃ = P_bᵀ Ω P_b`.
    /// The result follows the full equations for the transformed mass
    /// tensor [`Self::full_mass`].
    pub fn transform_full(
        &self,
        p_space: &OrthogonalMatrix<T>,
        s: &FullState<T>,
    ) -> Result<FullState<T>> {
        let g = p_space.transpose().mul(s.g()).mul(&self.p_body);
        let omega = s.omega().conjugated_by(&self.p_body);
        FullState::try_new(g, omega)
    }

    /// Largest deviation of the transformed attitude from the block form
    /// `blockdiag(ḡ, Id)`: off-block entries plus the identity defect of
    /// the trailing diagonal block.
    pub fn attitude_leakage(&self, p_space: &OrthogonalMatrix<T>, s: &FullState<T>) -> T {
        let g = p_space
            .transpose()
            .mul(s.g())
            .mul(&self.p_body);
        let m = g.matrix();
        let n = m.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for k in 0..n {
                if i < self.block && k < self.block {
                    continue;
                }
                let target = if i == k { T::one() } else { T::zero() };
                worst = worst.max((m[(i, k)] - target).abs());
            }
        }
        worst
    }

    /// Restricts a block-confined full state to the block subproblem
    /// (leading attitude block, leading velocity block).
    pub fn restrict_full(
        &self,
        p_space: &OrthogonalMatrix<T>,
        s: &FullState<T>,
    ) -> Result<FullState<T>> {
        let big = self.transform_full(p_space, s)?;
        let b = self.block;
        let gm = big.g().matrix();
        let sub_g = SquareMatrix::from_fn(b, |i, k| gm[(i, k)]);
        let mut sub_om = SkewMatrix::zeros(b);
        for i in 0..b {
            for k in i + 1..b {
                sub_om.set(i, k, big.omega().get(i, k));
            }
        }
        FullState::try_new(OrthogonalMatrix::new(sub_g)?, sub_om)
    }
}

// ---------------------------------------------------------------------------
// Relative-equilibrium reconstruction (n = 4)
// ---------------------------------------------------------------------------

/// The explicit quasi-periodic solution of the full 4D system with mass
/// tensor diag[J₁, J₁, J₂, J₂] sitting over the relative equilibrium
/// `(A₀, B₀, P, 0)` of the cone flow at energy `h`:
///
/// ```text
/// g(t) = R₃(ω₃t) · g₀ · blockdiag(R(ω₁t), R(ω₂t)),
/// ω₁ = 2√(2h)/√(4J₁h+P),  ω₂ = 2√(2h)/√(4J₂h+P),
/// ω₃ = −4h√P/(√(4J₁h+P)·√(4J₂h+P)),
/// ```
///
/// where `R(θ)` is the planar rotation by `θ`, `R₃` rotates the last two
/// spatial axes, and `g₀` is the fixed attitude below. The contact
/// direction and momentum rotate with frequencies ω₁, ω₂; the attitude
/// carries the third frequency.
#[derive(Clone, Debug)]
pub struct CylReleq<T> {
    mass: MassTensor<T>,
    j1: T,
    j2: T,
    h: T,
    p_sq: T,
    a0: T,
    b0: T,
    omega: (T, T, T),
    g0: SquareMatrix<T>,
}

impl<T: Real> CylReleq<T> {
    /// Validates that `(h, P)` lies strictly inside the image of the
    /// energy-momentum map (the relative equilibrium exists and sits in
    /// the interior of the cone), and assembles the closed form.
    pub fn try_new(j1: T, j2: T, h: T, p_sq: T) -> Result<Self> {
        let mass = MassTensor::try_new(vec![j1, j1, j2, j2])?;
        let eq = cyl_equilibrium(j1, j2, h, p_sq)?;
        let outside = Error::OutsideImage {
            momentum: p_sq.to_f64().unwrap_or(f64::NAN),
            energy: h.to_f64().unwrap_or(f64::NAN),
        };
        let Some(c) = eq else {
            return Err(outside);
        };
        let (a0, b0) = (c.a, c.b);
        // Strict interior: all four square-root entries of g₀ are nonzero.
        if !(a0 > T::zero() && a0 < T::one() && b0 > T::zero() && b0 < p_sq) {
            return Err(outside);
        }
        let four = T::lit(4.0);
        let two = T::lit(2.0);
        let r1 = (four * j1 * h + p_sq).sqrt();
        let r2 = (four * j2 * h + p_sq).sqrt();
        let omega = (
            two * (two * h).sqrt() / r1,
            two * (two * h).sqrt() / r2,
            -four * h * p_sq.sqrt() / (r1 * r2),
        );
        let (sa, ca) = (a0.sqrt(), (T::one() - a0).sqrt());
        let (sb, cb) = ((b0 / p_sq).sqrt(), ((p_sq - b0) / p_sq).sqrt());
        let mut g0 = SquareMatrix::<T>::zeros(4);
        let entries = [
            [sa, T::zero(), ca, T::zero()],
            [T::zero(), sb, T::zero(), cb],
            [ca, T::zero(), -sa, T::zero()],
            [T::zero(), cb, T::zero(), -sb],
        ];
        for (i, row) in entries.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                g0[(i, k)] = v;
            }
        }
        Ok(Self {
            mass,
            j1,
            j2,
            h,
            p_sq,
            a0,
            b0,
            omega,
            g0,
        })
    }

    /// The mass tensor diag[J₁, J₁, J₂, J₂] this solution belongs to.
    pub fn mass(&self) -> &MassTensor<T> {
        &self.mass
    }

    /// The three rotation frequencies `(ω₁, ω₂, ω₃)`.
    pub fn frequencies(&self) -> (T, T, T) {
        self.omega
    }

    /// The underlying cone equilibrium `(A₀, B₀, P, 0)`.
    pub fn equilibrium(&self) -> CylPoint<T> {
        CylPoint {
            a: self.a0,
            b: self.b0,
            p_sq: self.p_sq,
            d: T::zero(),
        }
    }

    /// The fixed attitude `g₀ = g(0)`.
    pub fn initial_attitude(&self) -> &SquareMatrix<T> {
        &self.g0
    }

    /// Contact direction and momentum at time `t`:
    /// `q = (√A₀ cos ω₁t, −√A₀ sin ω₁t, √(1−A₀) cos ω₂t, −√(1−A₀) sin ω₂t)`,
    /// `p = (−√B₀ sin ω₁t, −√B₀ cos ω₁t, −√(P−B₀) sin ω₂t, −√(P−B₀) cos ω₂t)`.
    pub fn reduced_at(&self, t: T) -> Result<ReducedState<T>> {
        let (w1, w2, _) = self.omega;
        let sa = self.a0.sqrt();
        let ca = (T::one() - self.a0).sqrt();
        let sb = self.b0.sqrt();
        let cb = (self.p_sq - self.b0).sqrt();
        let (c1, s1) = ((w1 * t).cos(), (w1 * t).sin());
        let (c2, s2) = ((w2 * t).cos(), (w2 * t).sin());
        let q = Vector::from_vec(vec![sa * c1, -sa * s1, ca * c2, -ca * s2]);
        let p = Vector::from_vec(vec![-sb * s1, -sb * c1, -cb * s2, -cb * c2]);
        ReducedState::try_new(q, p)
    }

    /// Attitude and its time derivative at `t`.
    fn attitude_pair(&self, t: T) -> (SquareMatrix<T>, SquareMatrix<T>) {
        let (w1, w2, w3) = self.omega;
        let rot = |w: T| -> (SquareMatrix<T>, SquareMatrix<T>) {
            // 2x2 rotation by w·t and its time derivative
            let (c, s) = ((w * t).cos(), (w * t).sin());
            let r = SquareMatrix::from_fn(2, |i, j| match (i, j) {
                (0, 0) => c,
                (0, 1) => -s,
                (1, 0) => s,
                _ => c,
            });
            let dr = SquareMatrix::from_fn(2, |i, j| match (i, j) {
                (0, 0) => -w * s,
                (0, 1) => -w * c,
                (1, 0) => w * c,
                _ => -w * s,
            });
            (r, dr)
        };
        let (r1, dr1) = rot(w1);
        let (r2, dr2) = rot(w2);
        let (r3, dr3) = rot(w3);
        let mut b = SquareMatrix::<T>::zeros(4);
        let mut db = SquareMatrix::<T>::zeros(4);
        for i in 0..2 {
            for k in 0..2 {
                b[(i, k)] = r1[(i, k)];
                b[(i + 2, k + 2)] = r2[(i, k)];
                db[(i, k)] = dr1[(i, k)];
                db[(i + 2, k + 2)] = dr2[(i, k)];
            }
        }
        let mut sp = SquareMatrix::<T>::identity(4);
        let mut dsp = SquareMatrix::<T>::zeros(4);
        for i in 0..2 {
            for k in 0..2 {
                sp[(i + 2, k + 2)] = r3[(i, k)];
                dsp[(i + 2, k + 2)] = dr3[(i, k)];
            }
        }
        let g0b = self.g0.mul(&b);
        let g = sp.mul(&g0b);
        let mut gdot = dsp.mul(&g0b);
        gdot.axpy(T::one(), &sp.mul(&self.g0.mul(&db)));
        (g, gdot)
    }

    /// Full state `(g(t), Ω(t))` with `Ω = gᵀġ`.
    pub fn state_at(&self, t: T) -> Result<FullState<T>> {
        let (g, gdot) = self.attitude_pair(t);
        let omega_dense = g.transpose().mul(&gdot);
        let omega = SkewMatrix::from_dense(&omega_dense, T::lit(1e-10))?;
        FullState::try_new(OrthogonalMatrix::new(g)?, omega)
    }

    /// Convenience scalar accessors.
    pub fn energy(&self) -> T {
        self.h
    }

    pub fn momentum_sq(&self) -> T {
        self.p_sq
    }

    pub fn moments(&self) -> (T, T) {
        (self.j1, self.j2)
    }
}
