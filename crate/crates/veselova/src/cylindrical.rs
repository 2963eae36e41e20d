//! Second reduction of the cylindrical body.
//!
//! When the mass tensor has exactly two distinct moments `J₁` (on an
//! `r`-dimensional eigenspace, `r ≥ 2`) and `J₂` (on the complementary
//! `r′ = n−r` dimensions), the residual symmetry `O(r) × O(r′)` reduces
//! the sphere bundle to four invariants
//!
//! ```text
//! A = ‖q₁‖²,   B = ‖p₁‖²,   P = ‖p‖²,   D = p₁·q₁
//! ```
//!
//! (block subscripts denote the two coordinate groups), ranging over the
//! cone `0 ≤ A ≤ 1`, `0 ≤ B ≤ P`, `D² ≤ AB`, `D² ≤ (1−A)(P−B)`.
//! With `β₁ = 1/((J₁−J₂)A + J₁+J₂)` and `β₂ = 1/((J₁−J₂)A + 2J₂)` the
//! reduced equations are
//!
//! ```text
//! Ȧ = 2D/(J₁+J₂),   Ḃ = −4HD,   Ṗ = 0,
//! Ḋ = −4HA + (P − 4J₂H)/(J₁−J₂),
//! ```
//!
//! with energy `H = ½((β₁−β₂)B + β₂P − (β₁−β₂)²D²/(β₁A + β₂(1−A)))`.
//! Besides `P` and `H` the quantity `F = 2(J₁+J₂)AH + B` is conserved,
//! and every level set is a harmonic oscillation with
//! `ω² = 8H/(J₁+J₂)` — solved in closed form below.

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::reduced::{IntegratorOptions, ReducedState};
use crate::scalar::Real;
use crate::strata::{Stratum, StratumTag};

/// Default tolerance for stratum/cone equality tests (scaled by
/// `max(1, P)`).
pub fn stratum_tol<T: Real>() -> T {
    T::lit(1e-9)
}

/// Bodies with `|J₁ − J₂|` below this are rejected by the cylindrical
/// formulas (the field contains `(J₁−J₂)⁻¹` explicitly).
pub fn moment_gap_tol<T: Real>() -> T {
    T::lit(1e-12)
}

fn check_gap<T: Real>(j1: T, j2: T) -> Result<()> {
    if (j1 - j2).abs() < moment_gap_tol::<T>() {
        return Err(Error::DegenerateBody {
            gap: (j1 - j2).abs().to_f64().unwrap_or(f64::NAN),
            tol: moment_gap_tol::<T>().to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// A point of the cylindrical second reduced space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylPoint<T> {
    /// `A = ‖q₁‖²`.
    pub a: T,
    /// `B = ‖p₁‖²`.
    pub b: T,
    /// `P = ‖p‖²`.
    pub p_sq: T,
    /// `D = p₁·q₁`.
    pub d: T,
}

impl<T: Real> CylPoint<T> {
    /// Signed violation of the cone inequalities: ≤ 0 inside, positive
    /// outside (commensurable with `max(1, P)`).
    pub fn violation(&self) -> T {
        let CylPoint { a, b, p_sq: p, d } = *self;
        let mut v = -a;
        v = v.max(a - T::one());
        v = v.max(-b);
        v = v.max(b - p);
        v = v.max(d * d - a * b);
        v = v.max(d * d - (T::one() - a) * (p - b));
        v
    }

    /// Admits the point if the cone inequalities hold within
    /// `tol·max(1, P)`.
    pub fn try_new(a: T, b: T, p_sq: T, d: T, tol: T) -> Result<Self> {
        let c = CylPoint { a, b, p_sq, d };
        let v = c.violation();
        if v > tol * T::one().max(p_sq.abs()) {
            return Err(Error::OutsideSpace {
                space: "cylindrical cone",
                constraint: "0≤A≤1, 0≤B≤P, D²≤AB, D²≤(1−A)(P−B)",
                violation: v.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(c)
    }
}

/// The block invariants of a bundle point under `O(r) × O(n−r)`
/// (coordinates `0..r` form the first block). Requires `r ≥ 2` and
/// `n−r ≥ 2`.
pub fn cyl_invariants<T: Real>(s: &ReducedState<T>, r: usize) -> Result<CylPoint<T>> {
    let n = s.dim();
    if r < 2 || n - r < 2 {
        return Err(Error::DimensionTooSmall {
            context: "cylindrical block split (needs r ≥ 2 and n−r ≥ 2)",
            min: 2,
            got: r.min(n - r),
        });
    }
    let (q1, _) = s.q().split(r);
    let (p1, _) = s.p().split(r);
    Ok(CylPoint {
        a: q1.norm_sq(),
        b: p1.norm_sq(),
        p_sq: s.p().norm_sq(),
        d: p1.dot(&q1),
    })
}

/// Classifies a cone point by isotropy type, testing lower-dimensional
/// strata first. Equalities use the absolute tolerance `tol·max(1, P)`.
pub fn cyl_stratum<T: Real>(c: &CylPoint<T>, tol: T) -> Result<Stratum> {
    let eps = tol * T::one().max(c.p_sq.abs());
    if c.violation() > eps {
        return Err(Error::OutsideSpace {
            space: "cylindrical cone",
            constraint: "0≤A≤1, 0≤B≤P, D²≤AB, D²≤(1−A)(P−B)",
            violation: c.violation().to_f64().unwrap_or(f64::NAN),
        });
    }
    let CylPoint { a, b, p_sq: p, d } = *c;
    let a0 = a.abs() <= eps;
    let a1 = (a - T::one()).abs() <= eps;
    let b0 = b.abs() <= eps;
    let bp = (p - b).abs() <= eps;
    let p0 = p.abs() <= eps;
    let d0 = d.abs() <= eps;
    let lower_eq = (d * d - a * b).abs() <= eps;
    let upper_eq = (d * d - (T::one() - a) * (p - b)).abs() <= eps;
    let tag = if a0 && b0 && p0 && d0 {
        StratumTag::S0
    } else if a1 && b0 && p0 && d0 {
        StratumTag::S0Prime
    } else if a0 && b0 && d0 {
        StratumTag::S1
    } else if a1 && bp && d0 {
        StratumTag::S1Prime
    } else if lower_eq && upper_eq {
        StratumTag::S2
    } else if lower_eq {
        StratumTag::S3
    } else if upper_eq {
        StratumTag::S3Prime
    } else {
        StratumTag::S4
    };
    Ok(Stratum::cylindrical(tag))
}

/// The coefficient pair `(β₁, β₂)` at block overlap `A`.
pub fn betas<T: Real>(j1: T, j2: T, a: T) -> (T, T) {
    let two = T::lit(2.0);
    (
        T::one() / ((j1 - j2) * a + j1 + j2),
        T::one() / ((j1 - j2) * a + two * j2),
    )
}

/// Reduced energy on the cone.
pub fn cyl_hamiltonian<T: Real>(j1: T, j2: T, c: &CylPoint<T>) -> T {
    let (b1, b2) = betas(j1, j2, c.a);
    let diff = b1 - b2;
    let s = b1 * c.a + b2 * (T::one() - c.a);
    T::lit(0.5) * (diff * c.b + b2 * c.p_sq - diff * diff * c.d * c.d / s)
}

/// Analytic gradient of the energy with respect to `(A, B, P, D)`.
pub fn cyl_energy_gradient<T: Real>(j1: T, j2: T, c: &CylPoint<T>) -> (T, T, T, T) {
    let half = T::lit(0.5);
    let (b1, b2) = betas(j1, j2, c.a);
    let db1 = -(j1 - j2) * b1 * b1;
    let db2 = -(j1 - j2) * b2 * b2;
    let diff = b1 - b2;
    let ddiff = db1 - db2;
    let s = b1 * c.a + b2 * (T::one() - c.a);
    let ds = db1 * c.a + b1 + db2 * (T::one() - c.a) - b2;
    let d_sq = c.d * c.d;
    let ga = half
        * (ddiff * c.b + db2 * c.p_sq
            - d_sq * (T::lit(2.0) * diff * ddiff * s - diff * diff * ds) / (s * s));
    let gb = half * diff;
    let gp = half * b2;
    let gd = -diff * diff * c.d / s;
    (ga, gb, gp, gd)
}

/// Reduced vector field `(Ȧ, Ḃ, Ṗ, Ḋ)`. Fails with `DegenerateBody`
/// when `J₁ ≈ J₂` (the formula divides by the gap).
pub fn cyl_vector_field<T: Real>(j1: T, j2: T, c: &CylPoint<T>) -> Result<(T, T, T, T)> {
    check_gap(j1, j2)?;
    let h = cyl_hamiltonian(j1, j2, c);
    let four = T::lit(4.0);
    Ok((
        T::lit(2.0) * c.d / (j1 + j2),
        -four * h * c.d,
        T::zero(),
        -four * h * c.a + (c.p_sq - four * j2 * h) / (j1 - j2),
    ))
}

/// The third integral `F = 2(J₁+J₂)·A·H + B`.
pub fn integral_f<T: Real>(j1: T, j2: T, c: &CylPoint<T>) -> T {
    T::lit(2.0) * (j1 + j2) * c.a * cyl_hamiltonian(j1, j2, c) + c.b
}

/// The relative equilibrium at energy `h > 0` and momentum `P`:
/// `A₀ = (P−4J₂h)/(4(J₁−J₂)h)`, `B₀ = (P−4J₂h)(P+4J₁h)/(8(J₁−J₂)h)`,
/// `D = 0`; `None` when the formulas land outside the cone (the pair
/// `(P, h)` is outside the image of the energy-momentum map).
pub fn cyl_equilibrium<T: Real>(j1: T, j2: T, h: T, p_sq: T) -> Result<Option<CylPoint<T>>> {
    check_gap(j1, j2)?;
    if h <= T::zero() || !h.is_finite() {
        return Err(Error::InvalidState {
            context: "cylindrical equilibrium",
            what: "energy must be positive",
            value: h.to_f64().unwrap_or(f64::NAN),
            tol: 0.0,
        });
    }
    let four = T::lit(4.0);
    let gap = j1 - j2;
    let a0 = (p_sq - four * j2 * h) / (four * gap * h);
    let b0 = (p_sq - four * j2 * h) * (p_sq + four * j1 * h) / (T::lit(8.0) * gap * h);
    Ok(CylPoint::try_new(a0, b0, p_sq, T::zero(), stratum_tol::<T>()).ok())
}

/// Harmonic closed-form solution of the cylindrical reduced flow at
/// energy `h`:
///
/// ```text
/// A(t) = C₁cos(ωt) + C₂sin(ωt) + A*,
/// D(t) = ½(J₁+J₂)ω(−C₁sin(ωt) + C₂cos(ωt)),
/// B(t) = −2h(J₁+J₂)(C₁cos(ωt) + C₂sin(ωt)) + B*,
/// ω² = 8h/(J₁+J₂),   P = 4h((J₁−J₂)A* + J₂).
/// ```
#[derive(Clone, Copy, Debug)]
pub struct CylClosedForm<T> {
    pub j1: T,
    pub j2: T,
    pub h: T,
    pub p_sq: T,
    pub c1: T,
    pub c2: T,
    pub a_star: T,
    pub b_star: T,
}

impl<T: Real> CylClosedForm<T> {
    /// Builds the solution from explicit constants; `P` is determined by
    /// the centre `A*` through the equilibrium relation.
    pub fn from_constants(j1: T, j2: T, h: T, c1: T, c2: T, a_star: T, b_star: T) -> Result<Self> {
        if h < T::zero() || !h.is_finite() {
            return Err(Error::InvalidState {
                context: "cylindrical closed form",
                what: "energy must be nonnegative",
                value: h.to_f64().unwrap_or(f64::NAN),
                tol: 0.0,
            });
        }
        let p_sq = T::lit(4.0) * h * ((j1 - j2) * a_star + j2);
        Ok(CylClosedForm {
            j1,
            j2,
            h,
            p_sq,
            c1,
            c2,
            a_star,
            b_star,
        })
    }

    /// Matches the solution through the cone point `c0` at `t = 0`.
    pub fn from_point(j1: T, j2: T, c0: &CylPoint<T>) -> Result<Self> {
        check_gap(j1, j2)?;
        let h = cyl_hamiltonian(j1, j2, c0);
        if h <= T::zero() || !h.is_finite() {
            return Err(Error::InvalidState {
                context: "cylindrical closed form",
                what: "energy must be positive to fit oscillation constants",
                value: h.to_f64().unwrap_or(f64::NAN),
                tol: 0.0,
            });
        }
        let four = T::lit(4.0);
        let a_star = (c0.p_sq - four * j2 * h) / (four * (j1 - j2) * h);
        let omega = (T::lit(8.0) * h / (j1 + j2)).sqrt();
        let c1 = c0.a - a_star;
        let c2 = T::lit(2.0) * c0.d / ((j1 + j2) * omega);
        let b_star = c0.b + T::lit(2.0) * h * (j1 + j2) * c1;
        Ok(CylClosedForm {
            j1,
            j2,
            h,
            p_sq: c0.p_sq,
            c1,
            c2,
            a_star,
            b_star,
        })
    }

    /// Oscillation frequency `ω = √(8h/(J₁+J₂))`.
    pub fn omega(&self) -> T {
        (T::lit(8.0) * self.h / (self.j1 + self.j2)).sqrt()
    }

    /// Period `2π/ω = π√((J₁+J₂)/(2h))` of every non-equilibrium orbit
    /// at energy `h` — independent of `P` and of the initial point.
    pub fn period(&self) -> T {
        T::PI() * ((self.j1 + self.j2) / (T::lit(2.0) * self.h)).sqrt()
    }

    pub fn eval(&self, t: T) -> CylPoint<T> {
        let omega = self.omega();
        let (s, c) = (omega * t).sin_cos();
        let osc = self.c1 * c + self.c2 * s;
        let a = osc + self.a_star;
        let d = T::lit(0.5) * (self.j1 + self.j2) * omega * (-self.c1 * s + self.c2 * c);
        let b = -T::lit(2.0) * self.h * (self.j1 + self.j2) * osc + self.b_star;
        CylPoint {
            a,
            b,
            p_sq: self.p_sq,
            d,
        }
    }
}

/// Period of any non-equilibrium cylindrical orbit at energy `h > 0`.
pub fn cyl_period<T: Real>(j1: T, j2: T, h: T) -> T {
    T::PI() * ((j1 + j2) / (T::lit(2.0) * h)).sqrt()
}

/// Invariant measure density `β₁(A)·β₂(A)` on the cone coordinates
/// `(A, B, P, D)`.
pub fn cyl_measure_density<T: Real>(j1: T, j2: T, a: T) -> T {
    let (b1, b2) = betas(j1, j2, a);
    b1 * b2
}

fn cyl_divergence<T: Real>(j1: T, j2: T, c: &CylPoint<T>, h: T, weighted: bool) -> Result<T> {
    let mut div = T::zero();
    for k in 0..4usize {
        let shift = |sign: T| -> CylPoint<T> {
            let mut c2 = *c;
            let delta = sign * h;
            match k {
                0 => c2.a += delta,
                1 => c2.b += delta,
                2 => c2.p_sq += delta,
                _ => c2.d += delta,
            }
            c2
        };
        let component = |pt: &CylPoint<T>| -> Result<T> {
            let f = cyl_vector_field(j1, j2, pt)?;
            let fk = match k {
                0 => f.0,
                1 => f.1,
                2 => f.2,
                _ => f.3,
            };
            let w = if weighted {
                cyl_measure_density(j1, j2, pt.a)
            } else {
                T::one()
            };
            Ok(w * fk)
        };
        let plus = component(&shift(T::one()))?;
        let minus = component(&shift(-T::one()))?;
        div += (plus - minus) / (T::lit(2.0) * h);
    }
    Ok(div)
}

/// |divergence| of the measure-weighted field `β₁β₂·(Ȧ,Ḃ,Ṗ,Ḋ)` with
/// respect to `(A,B,P,D)` at `c`, by centred differences with Richardson
/// extrapolation (steps `fd_step` and `2·fd_step`). Near zero when
/// `β₁β₂ dA dB dP dD` is an invariant measure.
pub fn cyl_measure_divergence_residual<T: Real>(
    j1: T,
    j2: T,
    c: &CylPoint<T>,
    fd_step: T,
) -> Result<T> {
    let fine = cyl_divergence(j1, j2, c, fd_step, true)?;
    let coarse = cyl_divergence(j1, j2, c, fd_step * T::lit(2.0), true)?;
    Ok(((T::lit(4.0) * fine - coarse) / T::lit(3.0)).abs())
}

/// Same divergence but with constant density 1 — the negative control:
/// the unweighted field is *not* divergence-free.
pub fn cyl_divergence_residual_constant_density<T: Real>(
    j1: T,
    j2: T,
    c: &CylPoint<T>,
    fd_step: T,
) -> Result<T> {
    let fine = cyl_divergence(j1, j2, c, fd_step, false)?;
    let coarse = cyl_divergence(j1, j2, c, fd_step * T::lit(2.0), false)?;
    Ok(((T::lit(4.0) * fine - coarse) / T::lit(3.0)).abs())
}

/// A recorded cylindrical trajectory with conservation diagnostics.
#[derive(Clone, Debug)]
pub struct CylTrajectory<T> {
    pub times: Vec<T>,
    pub points: Vec<CylPoint<T>>,
    pub max_energy_drift: T,
    pub max_f_drift: T,
}

/// RK4 integration of the cylindrical reduced field, recording every
/// `stride`-th step and guarding the relative energy drift.
pub fn integrate_cyl<T: Real>(
    j1: T,
    j2: T,
    c0: &CylPoint<T>,
    opts: &IntegratorOptions<T>,
) -> Result<CylTrajectory<T>> {
    check_gap(j1, j2)?;
    let stride = opts.stride.max(1);
    let h0 = cyl_hamiltonian(j1, j2, c0);
    let f0 = integral_f(j1, j2, c0);
    let h_scale = h0.abs().max(T::one());
    let f_scale = f0.abs().max(T::one());
    let mut c = *c0;
    let mut traj = CylTrajectory {
        times: vec![T::zero()],
        points: vec![*c0],
        max_energy_drift: T::zero(),
        max_f_drift: T::zero(),
    };
    let half = T::lit(0.5);
    let add = |c: &CylPoint<T>, s: T, f: &(T, T, T, T)| CylPoint {
        a: c.a + s * f.0,
        b: c.b + s * f.1,
        p_sq: c.p_sq + s * f.2,
        d: c.d + s * f.3,
    };
    for step in 1..=opts.steps {
        let k1 = cyl_vector_field(j1, j2, &c)?;
        let k2 = cyl_vector_field(j1, j2, &add(&c, half * opts.dt, &k1))?;
        let k3 = cyl_vector_field(j1, j2, &add(&c, half * opts.dt, &k2))?;
        let k4 = cyl_vector_field(j1, j2, &add(&c, opts.dt, &k3))?;
        let sixth = opts.dt / T::lit(6.0);
        c = CylPoint {
            a: c.a + sixth * (k1.0 + T::lit(2.0) * (k2.0 + k3.0) + k4.0),
            b: c.b + sixth * (k1.1 + T::lit(2.0) * (k2.1 + k3.1) + k4.1),
            p_sq: c.p_sq + sixth * (k1.2 + T::lit(2.0) * (k2.2 + k3.2) + k4.2),
            d: c.d + sixth * (k1.3 + T::lit(2.0) * (k2.3 + k3.3) + k4.3),
        };
        let h = cyl_hamiltonian(j1, j2, &c);
        let drift = (h - h0).abs() / h_scale;
        traj.max_energy_drift = traj.max_energy_drift.max(drift);
        traj.max_f_drift = traj
            .max_f_drift
            .max((integral_f(j1, j2, &c) - f0).abs() / f_scale);
        if !drift.is_finite() || drift > opts.energy_guard {
            return Err(Error::DriftError {
                context: "cylindrical energy drift",
                value: drift.to_f64().unwrap_or(f64::NAN),
                limit: opts.energy_guard.to_f64().unwrap_or(f64::NAN),
            });
        }
        if step % stride == 0 {
            traj.times.push(T::from_index(step) * opts.dt);
            traj.points.push(c);
        }
    }
    Ok(traj)
}

/// Lifts a cone point to a representative bundle point for the block
/// split `ℝⁿ = ℝʳ × ℝ^{n−r}` (needs `r ≥ 2`, `n−r ≥ 2`): the position
/// uses coordinates `0` and `r`, the momentum at most `0, 1, r, r+1`.
pub fn cyl_lift<T: Real>(c: &CylPoint<T>, r: usize, n: usize) -> Result<ReducedState<T>> {
    if r < 2 || n < r + 2 {
        return Err(Error::DimensionTooSmall {
            context: "cylindrical lift (needs r ≥ 2 and n−r ≥ 2)",
            min: 2,
            got: if r < 2 { r } else { n - r },
        });
    }
    CylPoint::try_new(c.a, c.b, c.p_sq, c.d, stratum_tol::<T>())?;
    let eps = T::lit(1e-12) * T::one().max(c.p_sq);
    let a = c.a.max(T::zero()).min(T::one());
    let mut q = Vector::zeros(n);
    let mut p = Vector::zeros(n);
    if a <= eps {
        // first block empty: D = 0 forced by the cone
        q[r] = T::one();
        p[0] = c.b.max(T::zero()).sqrt();
        p[r + 1] = (c.p_sq - c.b).max(T::zero()).sqrt();
    } else if a >= T::one() - eps {
        // second block empty
        q[0] = T::one();
        p[1] = c.b.max(T::zero()).sqrt();
        p[r] = (c.p_sq - c.b).max(T::zero()).sqrt();
    } else {
        let sa = a.sqrt();
        let sc = (T::one() - a).sqrt();
        q[0] = sa;
        q[r] = sc;
        p[0] = c.d / sa;
        p[r] = -c.d / sc;
        // Cone-surface residuals AB − D² and (1−A)(P−B) − D².  Points on the
        // surface must lift exactly onto it, so residuals at the scale of the
        // cancellation roundoff (ε·P²) snap to zero; otherwise √(residual)
        // would inject a spurious ~1e-8 transverse component.
        let snap = T::epsilon() * T::lit(32.0) * T::one().max(c.p_sq * c.p_sq);
        let low = c.b * a - c.d * c.d;
        p[1] = if low.abs() <= snap {
            T::zero()
        } else {
            (low / a).max(T::zero()).sqrt()
        };
        let up = (c.p_sq - c.b) * (T::one() - a) - c.d * c.d;
        p[r + 1] = if up.abs() <= snap {
            T::zero()
        } else {
            (up / (T::one() - a)).max(T::zero()).sqrt()
        };
    }
    ReducedState::project(q, p)
}
