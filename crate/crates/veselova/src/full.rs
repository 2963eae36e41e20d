//! The unreduced constrained system on the tangent bundle of O(n).
//!
//! A state is an attitude `g ∈ O(n)` and a body angular velocity
//! `Ω ∈ so(n)` subject to the constraints `⟨E_r∧E_s, Ω⟩ = 0` for
//! `1 ≤ r < s ≤ n−1` (0-based), where `E_r = g⁻¹e_r` is the r-th row of
//! `g`. Equivalently `Ω = q∧v` with `q = E_0` and some `v ⊥ q`.
//!
//! The equations of motion in momentum form, with `M = 𝕀(Ω)`:
//!
//! ```text
//! ġ = g Ω,
//! Ṁ = [M, Ω] + Σ_{r<s} λ_rs E_r∧E_s,
//! ```
//!
//! where the multipliers `λ` solve the positive-definite Gram system that
//! keeps the flow on the constraint distribution. Energy `H = ½⟨M, Ω⟩`
//! and the reduced momentum magnitude `|p|²` (with `p = −Mq`) are
//! conserved.

use crate::body::{MassTensor, PrincipalPlane};
use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, OrthogonalMatrix, SquareMatrix, Vector};
use crate::reduced::{IntegratorOptions, ReducedState};
use crate::scalar::Real;
use crate::skew::SkewMatrix;
use rand::Rng;

/// Default admission tolerance for the velocity constraints.
pub fn constraint_tol<T: Real>() -> T {
    T::lit(1e-10)
}

/// Attitude–velocity state on the constraint distribution.
#[derive(Clone, Debug)]
pub struct FullState<T> {
    g: OrthogonalMatrix<T>,
    omega: SkewMatrix<T>,
}

/// The Lagrange multipliers λ_rs indexed by the constraint pairs
/// `1 ≤ r < s ≤ n−1` (0-based rows of g), in lexicographic order.
#[derive(Clone, Debug)]
pub struct MultiplierSet<T> {
    pub pairs: Vec<(usize, usize)>,
    pub lambda: Vector<T>,
}

/// The constraint pairs `1 ≤ r < s ≤ n−1` in lexicographic order;
/// there are (n−1)(n−2)/2 of them.
pub fn constraint_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity((n - 1) * (n - 2) / 2);
    for r in 1..n {
        for s in r + 1..n {
            pairs.push((r, s));
        }
    }
    pairs
}

/// Constraint residuals `⟨E_r∧E_s, Ω⟩ = E_rᵀ Ω E_s` for raw `(g, Ω)` data,
/// in the order of `constraint_pairs`.
pub fn constraint_residuals_raw<T: Real>(g: &SquareMatrix<T>, omega: &SkewMatrix<T>) -> Vector<T> {
    let n = g.dim();
    let rows: Vec<Vector<T>> = (0..n).map(|r| g.row(r)).collect();
    let pairs = constraint_pairs(n);
    let mut out = Vector::zeros(pairs.len());
    for (k, &(r, s)) in pairs.iter().enumerate() {
        out[k] = rows[r].dot(&omega.apply(&rows[s]));
    }
    out
}

impl<T: Real> FullState<T> {
    /// Admits `(g, Ω)` after checking the velocity constraints within
    /// `tol` (the attitude is already certified by its type).
    pub fn try_new_with_tol(g: OrthogonalMatrix<T>, omega: SkewMatrix<T>, tol: T) -> Result<Self> {
        if g.dim() != omega.dim() {
            return Err(Error::DimensionMismatch {
                context: "full state",
                expected: g.dim(),
                got: omega.dim(),
            });
        }
        let res = constraint_residuals_raw(g.matrix(), &omega).max_abs();
        if res >= tol {
            return Err(Error::OutsideSpace {
                space: "constraint distribution",
                constraint: "max |E_r∧E_s paired with Ω|",
                violation: res.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { g, omega })
    }

    /// Admits with the default constraint tolerance.
    pub fn try_new(g: OrthogonalMatrix<T>, omega: SkewMatrix<T>) -> Result<Self> {
        Self::try_new_with_tol(g, omega, constraint_tol::<T>())
    }

    /// Builds the admissible state with attitude `g` and velocity
    /// `Ω = q∧v`, where `q = g⁻¹e₀` and `v` is `velocity` made orthogonal
    /// to `q`. This parametrizes the constraint distribution exactly.
    pub fn from_attitude_velocity(g: OrthogonalMatrix<T>, velocity: &Vector<T>) -> Result<Self> {
        let q = g.row(0);
        let mut v = velocity.clone();
        v.project_off_unit(&q);
        let omega = SkewMatrix::wedge(&q, &v);
        Self::try_new(g, omega)
    }

    pub fn g(&self) -> &OrthogonalMatrix<T> {
        &self.g
    }

    pub fn omega(&self) -> &SkewMatrix<T> {
        &self.omega
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// The contact point direction `q = g⁻¹e₀` (first row of g).
    pub fn q(&self) -> Vector<T> {
        self.g.row(0)
    }

    /// Body angular momentum `M = 𝕀(Ω)`.
    pub fn momentum(&self, j: &MassTensor<T>) -> SkewMatrix<T> {
        j.inertia_apply(&self.omega)
    }

    /// Energy `H = ½⟨𝕀(Ω), Ω⟩`.
    pub fn energy(&self, j: &MassTensor<T>) -> T {
        T::lit(0.5) * j.inertia_apply(&self.omega).pairing(&self.omega)
    }

    /// Constraint residuals of this state (should be ≈ 0).
    pub fn constraint_residuals(&self) -> Vector<T> {
        constraint_residuals_raw(self.g.matrix(), &self.omega)
    }

    /// Random admissible state: Haar attitude, Gaussian tangent velocity
    /// scaled by `v_scale`, `Ω = q∧v`.
    pub fn random_admissible<R: Rng + ?Sized>(n: usize, v_scale: T, rng: &mut R) -> Self {
        loop {
            let g = OrthogonalMatrix::random_haar(n, rng);
            let v = Vector::standard_normal(n, rng).scale(v_scale);
            if let Ok(s) = Self::from_attitude_velocity(g, &v) {
                return s;
            }
        }
    }
}

/// Transforms a state by the symmetry action `(A, B)·(g, Ω) = (AgB⁻¹, BΩB⁻¹)`
/// with `A` stabilizing `e₀` and `B` in the body's symmetry group.
pub fn transform_state<T: Real>(
    s: &FullState<T>,
    a: &OrthogonalMatrix<T>,
    b: &OrthogonalMatrix<T>,
) -> Result<FullState<T>> {
    let g_new = a.mul(&s.g).mul(&b.transpose());
    // B Ω B⁻¹ = B Ω Bᵀ = (Bᵀ)ᵀ Ω (Bᵀ)
    let omega_new = s.omega.conjugated_by(&b.transpose());
    FullState::try_new(g_new, omega_new)
}

/// Random element of the stabilizer of `e₀`: block-diag(±1-free 1, Haar O(n−1)).
pub fn random_e1_stabilizer<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> OrthogonalMatrix<T> {
    let block = OrthogonalMatrix::<T>::random_haar(n - 1, rng);
    let mut m = SquareMatrix::<T>::zeros(n);
    m[(0, 0)] = T::one();
    for i in 0..n - 1 {
        for jj in 0..n - 1 {
            m[(i + 1, jj + 1)] = block.matrix()[(i, jj)];
        }
    }
    OrthogonalMatrix::from_matrix_unchecked(m)
}

// ---------------------------------------------------------------------------
// Multipliers and vector field
// ---------------------------------------------------------------------------

fn wedge_basis_raw<T: Real>(g: &SquareMatrix<T>) -> Vec<SkewMatrix<T>> {
    let n = g.dim();
    let rows: Vec<Vector<T>> = (0..n).map(|r| g.row(r)).collect();
    constraint_pairs(n)
        .into_iter()
        .map(|(r, s)| SkewMatrix::wedge(&rows[r], &rows[s]))
        .collect()
}

fn solve_multipliers_raw<T: Real>(
    j: &MassTensor<T>,
    g: &SquareMatrix<T>,
    m: &SkewMatrix<T>,
) -> Result<(Vector<T>, Vec<SkewMatrix<T>>, SkewMatrix<T>)> {
    let omega = j.inertia_inverse_apply(m);
    let commutator = m.commutator(&omega);
    let basis = wedge_basis_raw(g);
    let k = basis.len();
    let inv_basis: Vec<SkewMatrix<T>> = basis.iter().map(|w| j.inertia_inverse_apply(w)).collect();
    let mut gram = SquareMatrix::<T>::zeros(k);
    let mut rhs = Vector::zeros(k);
    for a in 0..k {
        for b in 0..k {
            gram[(a, b)] = inv_basis[a].pairing(&basis[b]);
        }
        rhs[a] = -inv_basis[a].pairing(&commutator);
    }
    let lambda = cholesky_solve(&gram, &rhs)?;
    Ok((lambda, basis, commutator))
}

/// Solves the multiplier system
/// `Σ_b ⟨𝕀⁻¹(W_a), W_b⟩ λ_b = −⟨𝕀⁻¹(W_a), [M, Ω]⟩`, `W_a = E_r∧E_s`.
/// The system matrix is the Gram matrix of the constraint wedges in the
/// 𝕀⁻¹-inner product, hence symmetric positive definite.
pub fn solve_multipliers<T: Real>(j: &MassTensor<T>, s: &FullState<T>) -> Result<MultiplierSet<T>> {
    let m = s.momentum(j);
    let (lambda, _, _) = solve_multipliers_raw(j, s.g.matrix(), &m)?;
    Ok(MultiplierSet {
        pairs: constraint_pairs(s.dim()),
        lambda,
    })
}

/// Residual `|G λ − rhs|` of the multiplier system at `s` (diagnostic).
pub fn multiplier_system_residual<T: Real>(j: &MassTensor<T>, s: &FullState<T>) -> Result<T> {
    let m = s.momentum(j);
    let (lambda, basis, commutator) = solve_multipliers_raw(j, s.g.matrix(), &m)?;
    let inv_basis: Vec<SkewMatrix<T>> = basis.iter().map(|w| j.inertia_inverse_apply(w)).collect();
    let k = basis.len();
    let mut worst = T::zero();
    for a in 0..k {
        let mut acc = inv_basis[a].pairing(&commutator);
        for b in 0..k {
            acc += inv_basis[a].pairing(&basis[b]) * lambda[b];
        }
        worst = worst.max(acc.abs());
    }
    Ok(worst)
}

fn momentum_field_raw<T: Real>(
    j: &MassTensor<T>,
    g: &SquareMatrix<T>,
    m: &SkewMatrix<T>,
) -> Result<(SquareMatrix<T>, SkewMatrix<T>)> {
    let omega = j.inertia_inverse_apply(m);
    let (lambda, basis, commutator) = solve_multipliers_raw(j, g, m)?;
    let mut m_dot = commutator;
    for (a, w) in basis.iter().enumerate() {
        m_dot.axpy(lambda[a], w);
    }
    let g_dot = g.mul(&omega.to_dense());
    Ok((g_dot, m_dot))
}

/// The full vector field at `s`: `ġ = gΩ` and
/// `Ṁ = [M, Ω] + Σ λ_rs E_r∧E_s` (momentum form; `Ω̇` is recovered via the
/// inverse inertia operator).
pub fn vector_field_full<T: Real>(
    j: &MassTensor<T>,
    s: &FullState<T>,
) -> Result<(SquareMatrix<T>, SkewMatrix<T>)> {
    momentum_field_raw(j, s.g.matrix(), &s.momentum(j))
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

/// A recorded full trajectory with drift diagnostics accumulated over all
/// integration steps (not just recorded samples).
#[derive(Clone, Debug)]
pub struct FullTrajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<FullState<T>>,
    /// max relative energy drift `|H − H₀| / max(1, |H₀|)`.
    pub max_energy_drift: T,
    /// max relative drift of `|p|²` with `p = −Mq`.
    pub max_momentum_drift: T,
    /// max over steps of the post-projection constraint residual.
    pub max_constraint_residual: T,
    /// max over steps of `|gᵀg − Id|_F` after reorthonormalization.
    pub max_orthogonality_error: T,
}

fn rk4_step_full<T: Real>(
    j: &MassTensor<T>,
    g: &SquareMatrix<T>,
    m: &SkewMatrix<T>,
    dt: T,
) -> Result<(SquareMatrix<T>, SkewMatrix<T>)> {
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let (k1g, k1m) = momentum_field_raw(j, g, m)?;
    let mut g2 = g.clone();
    g2.axpy(half * dt, &k1g);
    let mut m2 = m.clone();
    m2.axpy(half * dt, &k1m);
    let (k2g, k2m) = momentum_field_raw(j, &g2, &m2)?;
    let mut g3 = g.clone();
    g3.axpy(half * dt, &k2g);
    let mut m3 = m.clone();
    m3.axpy(half * dt, &k2m);
    let (k3g, k3m) = momentum_field_raw(j, &g3, &m3)?;
    let mut g4 = g.clone();
    g4.axpy(dt, &k3g);
    let mut m4 = m.clone();
    m4.axpy(dt, &k3m);
    let (k4g, k4m) = momentum_field_raw(j, &g4, &m4)?;
    let sixth = dt / T::lit(6.0);
    let mut gn = g.clone();
    gn.axpy(sixth, &k1g);
    gn.axpy(sixth * two, &k2g);
    gn.axpy(sixth * two, &k3g);
    gn.axpy(sixth, &k4g);
    let mut mn = m.clone();
    mn.axpy(sixth, &k1m);
    mn.axpy(sixth * two, &k2m);
    mn.axpy(sixth * two, &k3m);
    mn.axpy(sixth, &k4m);
    Ok((gn, mn))
}

/// One post-step projection: polar-reorthonormalize `g`, then project the
/// velocity onto the constraint subspace at the new attitude — with
/// `q = g⁻¹e₀` and `Ω = 𝕀⁻¹(M)`, set `v = −Ωq` made tangent to the sphere
/// and replace `Ω ← q∧v`, `M ← 𝕀(Ω)`. This is the orthogonal projection
/// in the metric induced by the pairing.
fn project_step<T: Real>(
    j: &MassTensor<T>,
    g_raw: &SquareMatrix<T>,
    m_raw: &SkewMatrix<T>,
) -> Result<(OrthogonalMatrix<T>, SkewMatrix<T>, SkewMatrix<T>)> {
    let g = OrthogonalMatrix::reorthonormalize(g_raw)?;
    let q = g.row(0);
    let omega = j.inertia_inverse_apply(m_raw);
    let mut v = omega.apply(&q).scale(-T::one());
    v.project_off_unit(&q);
    let omega_proj = SkewMatrix::wedge(&q, &v);
    let m_proj = j.inertia_apply(&omega_proj);
    Ok((g, omega_proj, m_proj))
}

/// Integrates the full system by classical RK4 on `(g, M)` with per-step
/// reorthonormalization of `g` and projection of the velocity back onto
/// the constraint distribution. Aborts with `DriftError` when the
/// relative energy drift exceeds `opts.energy_guard`.
pub fn integrate_full<T: Real>(
    j: &MassTensor<T>,
    s0: &FullState<T>,
    opts: &IntegratorOptions<T>,
) -> Result<FullTrajectory<T>> {
    let stride = opts.stride.max(1);
    let h0 = s0.energy(j);
    let h_scale = h0.abs().max(T::one());
    let m0 = s0.momentum(j);
    let p0_sq = m0.apply(&s0.q()).norm_sq();
    let p_scale = p0_sq.abs().max(T::one());

    let mut g = s0.g.matrix().clone();
    let mut m = m0;
    let mut traj = FullTrajectory {
        times: vec![T::zero()],
        states: vec![s0.clone()],
        max_energy_drift: T::zero(),
        max_momentum_drift: T::zero(),
        max_constraint_residual: s0.constraint_residuals().max_abs(),
        max_orthogonality_error: s0.g.orthogonality_error(),
    };
    for step in 1..=opts.steps {
        let (g_raw, m_raw) = rk4_step_full(j, &g, &m, opts.dt)?;
        let (g_orth, omega, m_proj) = project_step(j, &g_raw, &m_raw)?;
        g = g_orth.matrix().clone();
        m = m_proj;

        let h = T::lit(0.5) * m.pairing(&omega);
        let e_drift = (h - h0).abs() / h_scale;
        traj.max_energy_drift = traj.max_energy_drift.max(e_drift);
        let p_sq = m.apply(&g_orth.row(0)).norm_sq();
        traj.max_momentum_drift = traj
            .max_momentum_drift
            .max((p_sq - p0_sq).abs() / p_scale);
        let cres = constraint_residuals_raw(&g, &omega).max_abs();
        traj.max_constraint_residual = traj.max_constraint_residual.max(cres);
        traj.max_orthogonality_error = traj
            .max_orthogonality_error
            .max(g_orth.orthogonality_error());
        if !e_drift.is_finite() || e_drift > opts.energy_guard {
            return Err(Error::DriftError {
                context: "full-system energy drift",
                value: e_drift.to_f64().unwrap_or(f64::NAN),
                limit: opts.energy_guard.to_f64().unwrap_or(f64::NAN),
            });
        }
        if step % stride == 0 {
            traj.times.push(T::from_index(step) * opts.dt);
            traj.states.push(FullState {
                g: g_orth.clone(),
                omega: omega.clone(),
            });
        }
    }
    Ok(traj)
}

// ---------------------------------------------------------------------------
// Steady rotations, projection to the reduced system, period measurement
// ---------------------------------------------------------------------------

/// Steady rotation in the principal plane `(i, j)` with angular speed
/// `speed`: the attitude places the contact direction `q` inside the
/// rotation plane (row swap of the identity), and `Ω = speed·(f_i∧f_j)`.
/// The result is a periodic solution with period `2π/|speed|`, energy
/// `H = ½(J_i+J_j)·speed²` and momentum norm `|M|² = (J_i+J_j)²·speed²`.
pub fn steady_rotation_state<T: Real>(
    j: &MassTensor<T>,
    plane: &PrincipalPlane<T>,
    speed: T,
) -> Result<FullState<T>> {
    let n = j.dim();
    let (i, jj) = plane.axes;
    if i >= n || jj >= n || i == jj {
        return Err(Error::DimensionMismatch {
            context: "principal plane axes",
            expected: n,
            got: i.max(jj),
        });
    }
    if speed == T::zero() || !speed.is_finite() {
        return Err(Error::InvalidState {
            context: "steady rotation",
            what: "speed",
            value: speed.to_f64().unwrap_or(f64::NAN),
            tol: 0.0,
        });
    }
    // attitude with q = g⁻¹e₀ = f_i: identity with rows 0 and i swapped
    let mut gm = SquareMatrix::<T>::identity(n);
    if i != 0 {
        gm[(0, 0)] = T::zero();
        gm[(i, i)] = T::zero();
        gm[(0, i)] = T::one();
        gm[(i, 0)] = T::one();
    }
    let g = OrthogonalMatrix::from_matrix_unchecked(gm);
    let fi = Vector::basis(n, i);
    let fj = Vector::basis(n, jj);
    let omega = SkewMatrix::wedge(&fi, &fj).scale(speed);
    FullState::try_new(g, omega)
}

/// Projects a full state to the reduced bundle point:
/// `q = g⁻¹e₀`, `p = −𝕀(Ω) q`.
pub fn project_to_reduced<T: Real>(j: &MassTensor<T>, s: &FullState<T>) -> Result<ReducedState<T>> {
    let q = s.q();
    let p = s.momentum(j).apply(&q).scale(-T::one());
    ReducedState::try_new(q, p)
}

/// Measures the period of a uniform rotation from sampled contact
/// directions: the phase `atan2(q·b, q·a)` is unwrapped incrementally and
/// the first crossing of total angle 2π is located by linear
/// interpolation. `times` and `qs` must be equally informative (same
/// length ≥ 3). Returns `InsufficientData` when no full turn is present.
pub fn measure_rotation_period<T: Real>(
    times: &[T],
    qs: &[Vector<T>],
    a: &Vector<T>,
    b: &Vector<T>,
) -> Result<T> {
    if times.len() != qs.len() || times.len() < 3 {
        return Err(Error::InsufficientData {
            reason: "need at least 3 aligned samples to measure a period",
        });
    }
    let two_pi = T::PI() * T::lit(2.0);
    let phase = |q: &Vector<T>| -> T { q.dot(b).atan2(q.dot(a)) };
    let mut unwrapped = T::zero();
    let mut prev_phase = phase(&qs[0]);
    for k in 1..qs.len() {
        let ph = phase(&qs[k]);
        let mut d = ph - prev_phase;
        while d > T::PI() {
            d -= two_pi;
        }
        while d < -T::PI() {
            d += two_pi;
        }
        prev_phase = ph;
        let prev_unwrapped = unwrapped;
        unwrapped += d;
        if unwrapped.abs() >= two_pi {
            // linear interpolation inside the crossing interval
            let before = prev_unwrapped.abs();
            let after = unwrapped.abs();
            let frac = (two_pi - before) / (after - before);
            let t_prev = times[k - 1];
            let t_cur = times[k];
            return Ok(t_prev + frac * (t_cur - t_prev));
        }
    }
    Err(Error::InsufficientData {
        reason: "trajectory does not complete a full turn",
    })
}
