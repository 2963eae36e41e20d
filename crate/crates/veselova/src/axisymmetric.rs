//! Second reduction of the axisymmetric body.
//!
//! When the mass tensor has one distinguished moment `J₁` (the symmetry
//! axis) and a repeated moment `J₂` on the complement, the residual
//! `O(n−1)` symmetry reduces the sphere bundle to three invariants
//! `(q₁, p₁, P)` — the axis components of position and momentum and the
//! conserved momentum magnitude `P = ‖p‖²`. Their range is the solid
//! "canoe" `p₁² ≤ (1−q₁²)P`, `|q₁| ≤ 1`, stratified by isotropy type.
//!
//! The reduced motion is linear:
//!
//! ```text
//! q̇₁ = p₁/(J₁+J₂),   ṗ₁ = −2H q₁,   Ṗ = 0,
//! H   = ((J₂−J₁)p₁² + (J₁+J₂)P) / (2(J₁+J₂)((J₁−J₂)q₁² + 2J₂)),
//! ```
//!
//! so every energy level carries harmonic oscillation with
//! `ω² = 2H/(J₁+J₂)`.

use crate::body::{MassTensor, SymmetryClass};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::reduced::ReducedState;
use crate::scalar::Real;
use crate::strata::{Stratum, StratumTag};

/// Default tolerance for stratum equality tests (scaled by `max(1, P)`).
pub fn stratum_tol<T: Real>() -> T {
    T::lit(1e-9)
}

/// A point of the axisymmetric second reduced space: axis components and
/// momentum magnitude, confined to the canoe `p₁² ≤ (1−q₁²)P`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxiPoint<T> {
    pub q1: T,
    pub p1: T,
    /// `P = ‖p‖²`.
    pub p_sq: T,
}

impl<T: Real> AxiPoint<T> {
    /// Signed violation of the canoe constraints: 0 when inside, positive
    /// when outside (absolute, commensurable with `max(1, P)`).
    pub fn violation(&self) -> T {
        let mut v = T::zero();
        v = v.max(-self.p_sq);
        v = v.max(self.q1.abs() - T::one());
        v = v.max(self.p1 * self.p1 - (T::one() - self.q1 * self.q1) * self.p_sq);
        v
    }

    /// Admits the point if the canoe inequalities hold within
    /// `tol·max(1, P)`.
    pub fn try_new(q1: T, p1: T, p_sq: T, tol: T) -> Result<Self> {
        let a = AxiPoint { q1, p1, p_sq };
        let scale = T::one().max(p_sq.abs());
        let v = a.violation();
        if v > tol * scale {
            return Err(Error::OutsideSpace {
                space: "axisymmetric canoe",
                constraint: "p1² ≤ (1−q1²)P, |q1| ≤ 1, P ≥ 0",
                violation: v.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(a)
    }
}

/// The distinguished and repeated moments `(J₁, J₂)` of an axisymmetric
/// body with symmetry axis `axis`. Fails if the body is not axisymmetric
/// about that axis at tolerance `eigen_tol`.
pub fn axi_moments<T: Real>(j: &MassTensor<T>, axis: usize, eigen_tol: T) -> Result<(T, T)> {
    match j.classify_symmetry(eigen_tol) {
        SymmetryClass::Axisymmetric { axis: a } if a == axis => {
            let other = (0..j.dim()).find(|&k| k != axis).unwrap();
            Ok((j.moment(axis), j.moment(other)))
        }
        _ => Err(Error::InvalidState {
            context: "axisymmetric reduction",
            what: "body is not axisymmetric about the requested axis",
            value: axis as f64,
            tol: eigen_tol.to_f64().unwrap_or(f64::NAN),
        }),
    }
}

/// The three invariants `(q_axis, p_axis, ‖p‖²)` of a bundle point under
/// the `O(n−1)` symmetry fixing `axis`.
pub fn axi_invariants<T: Real>(s: &ReducedState<T>, axis: usize) -> AxiPoint<T> {
    AxiPoint {
        q1: s.q()[axis],
        p1: s.p()[axis],
        p_sq: s.p().norm_sq(),
    }
}

/// Classifies a canoe point by isotropy type: the vertices
/// `(±1, 0, 0)` are the point strata (S0′ at `+1`, S0 at `−1`), the
/// canoe surface `p₁² = (1−q₁²)P` minus the vertices is S2, and the
/// interior is S3. Equalities are tested within `tol·max(1, P)`.
pub fn axi_stratum<T: Real>(a: &AxiPoint<T>, tol: T) -> Result<Stratum> {
    let scale = T::one().max(a.p_sq.abs());
    let eps = tol * scale;
    if a.violation() > eps {
        return Err(Error::OutsideSpace {
            space: "axisymmetric canoe",
            constraint: "p1² ≤ (1−q1²)P, |q1| ≤ 1, P ≥ 0",
            violation: a.violation().to_f64().unwrap_or(f64::NAN),
        });
    }
    let at_vertex = a.p_sq.abs() <= eps && a.p1.abs() <= eps && (a.q1.abs() - T::one()).abs() <= eps;
    if at_vertex {
        let tag = if a.q1 > T::zero() {
            StratumTag::S0Prime
        } else {
            StratumTag::S0
        };
        return Ok(Stratum::axisymmetric(tag));
    }
    let boundary_gap = (a.p1 * a.p1 - (T::one() - a.q1 * a.q1) * a.p_sq).abs();
    if boundary_gap <= eps {
        return Ok(Stratum::axisymmetric(StratumTag::S2));
    }
    Ok(Stratum::axisymmetric(StratumTag::S3))
}

/// Reduced energy on the canoe.
pub fn axi_hamiltonian<T: Real>(j1: T, j2: T, a: &AxiPoint<T>) -> T {
    let num = (j2 - j1) * a.p1 * a.p1 + (j1 + j2) * a.p_sq;
    let den = T::lit(2.0) * (j1 + j2) * ((j1 - j2) * a.q1 * a.q1 + T::lit(2.0) * j2);
    num / den
}

/// Reduced vector field `(q̇₁, ṗ₁, Ṗ)`; `Ṗ = 0` identically.
pub fn axi_vector_field<T: Real>(j1: T, j2: T, a: &AxiPoint<T>) -> (T, T, T) {
    let h = axi_hamiltonian(j1, j2, a);
    (
        a.p1 / (j1 + j2),
        -T::lit(2.0) * h * a.q1,
        T::zero(),
    )
}

/// Closed-form solution at energy `h ≥ 0`:
/// `q₁ = c₁cos(ωt) + c₂sin(ωt)`, `p₁ = (J₁+J₂)ω(−c₁sin(ωt) + c₂cos(ωt))`
/// with `ω² = 2h/(J₁+J₂)`.
pub fn axi_closed_form<T: Real>(j1: T, j2: T, h: T, c1: T, c2: T, t: T) -> (T, T) {
    let omega = (T::lit(2.0) * h / (j1 + j2)).sqrt();
    let (s, c) = (omega * t).sin_cos();
    let q1 = c1 * c + c2 * s;
    let p1 = (j1 + j2) * omega * (-c1 * s + c2 * c);
    (q1, p1)
}

/// Angular frequency `ω = √(2h/(J₁+J₂))` of the reduced oscillation.
pub fn axi_frequency<T: Real>(j1: T, j2: T, h: T) -> T {
    (T::lit(2.0) * h / (j1 + j2)).sqrt()
}

/// Lifts a canoe point to a representative bundle point in dimension
/// `n ≥ 3`, with the symmetry axis at coordinate 0: the position lies in
/// the `(f₀, f₁)` plane and the momentum fills at most `(f₀, f₁, f₂)`.
pub fn axi_lift<T: Real>(a: &AxiPoint<T>, n: usize) -> Result<ReducedState<T>> {
    if n < 3 {
        return Err(Error::DimensionTooSmall {
            context: "axisymmetric lift",
            min: 3,
            got: n,
        });
    }
    AxiPoint::try_new(a.q1, a.p1, a.p_sq, stratum_tol::<T>())?;
    let tail_sq = (T::one() - a.q1 * a.q1).max(T::zero());
    let tail = tail_sq.sqrt();
    let mut q = Vector::zeros(n);
    q[0] = a.q1;
    q[1] = tail;
    let mut p = Vector::zeros(n);
    if tail > T::lit(1e-12) {
        p[0] = a.p1;
        p[1] = -a.q1 * a.p1 / tail;
        let rest = a.p_sq - p[0] * p[0] - p[1] * p[1];
        // Canoe-surface points must lift exactly onto the surface: a
        // residual at the cancellation-roundoff scale (ε·P²) would turn
        // into a spurious ~√ε transverse momentum component.
        let snap = T::epsilon() * T::lit(32.0) * T::one().max(a.p_sq * a.p_sq);
        p[2] = if rest.abs() <= snap {
            T::zero()
        } else {
            rest.max(T::zero()).sqrt()
        };
    } else {
        // at the poles the canoe forces p1 = 0; any tangent direction works
        p[1] = a.p_sq.max(T::zero()).sqrt();
    }
    ReducedState::project(q, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::orthonormalize;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn state(q: &[f64], p: &[f64]) -> ReducedState<f64> {
        ReducedState::try_new(Vector::from_f64s(q), Vector::from_f64s(p)).unwrap()
    }

    #[test]
    fn invariants_examples() {
        // axis at coordinate 0
        let a = axi_invariants(&state(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), 0);
        assert_eq!((a.q1, a.p1, a.p_sq), (1.0, 0.0, 1.0));
        assert_eq!(
            axi_stratum(&a, stratum_tol()).unwrap().tag,
            StratumTag::S2,
            "pole with spinning momentum sits on the canoe surface"
        );
        let b = axi_invariants(&state(&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]), 0);
        assert_eq!((b.q1, b.p1, b.p_sq), (0.0, 1.0, 1.0));
        assert_eq!(axi_stratum(&b, stratum_tol()).unwrap().tag, StratumTag::S2);
        let c = AxiPoint::try_new(0.5, 0.5, 1.0, 1e-12).unwrap();
        assert_eq!(axi_stratum(&c, stratum_tol()).unwrap().tag, StratumTag::S3);
    }

    #[test]
    fn canoe_admission() {
        assert!(AxiPoint::try_new(0.5, 0.5, 1.0, 1e-12).is_ok());
        // p1² > (1−q1²)P
        assert!(AxiPoint::try_new(0.5, 0.9, 1.0, 1e-9).is_err());
        assert!(AxiPoint::try_new(1.2, 0.0, 1.0, 1e-9).is_err());
        assert!(AxiPoint::try_new(0.0, 0.0, -1.0, 1e-9).is_err());
        // every valid bundle point lands inside the canoe
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        for _ in 0..50 {
            let n = rng.random_range(3..6);
            let s = ReducedState::<f64>::random(n, 1.5, &mut rng);
            let a = axi_invariants(&s, 0);
            assert!(a.violation() <= 1e-13 * a.p_sq.max(1.0));
        }
    }

    #[test]
    fn vertex_strata() {
        let plus = AxiPoint::try_new(1.0, 0.0, 0.0, 1e-12).unwrap();
        assert_eq!(
            axi_stratum(&plus, stratum_tol()).unwrap().tag,
            StratumTag::S0Prime
        );
        let minus = AxiPoint::try_new(-1.0, 0.0, 0.0, 1e-12).unwrap();
        assert_eq!(axi_stratum(&minus, stratum_tol()).unwrap().tag, StratumTag::S0);
        // isotropy descriptors: vertices keep the whole group
        assert_eq!(axi_stratum(&plus, stratum_tol()).unwrap().isotropy_drop, (0, 0));
        let interior = AxiPoint::try_new(0.5, 0.5, 1.0, 1e-12).unwrap();
        assert_eq!(
            axi_stratum(&interior, stratum_tol()).unwrap().isotropy_drop,
            (0, 2)
        );
    }

    #[test]
    fn vector_field_and_energy_examples() {
        let a = AxiPoint {
            q1: 0.2,
            p1: 3.0,
            p_sq: 10.0,
        };
        let (q1_dot, _, p_dot) = axi_vector_field(1.0, 2.0, &a);
        assert_abs_diff_eq!(q1_dot, 1.0, epsilon = 1e-15);
        assert_eq!(p_dot, 0.0);
        let b = AxiPoint {
            q1: 0.0,
            p1: 0.0,
            p_sq: 8.0,
        };
        assert_abs_diff_eq!(axi_hamiltonian(1.0, 2.0, &b), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn equilibria_classes() {
        // the q1-axis (P = 0): H = 0, field vanishes
        let rest = AxiPoint {
            q1: 0.3,
            p1: 0.0,
            p_sq: 0.0,
        };
        let f = axi_vector_field(1.0, 2.0, &rest);
        assert_eq!(f, (0.0, 0.0, 0.0));
        assert_eq!(axi_hamiltonian(1.0, 2.0, &rest), 0.0);
        // the P-axis (q1 = p1 = 0)
        let spin = AxiPoint {
            q1: 0.0,
            p1: 0.0,
            p_sq: 5.0,
        };
        let f = axi_vector_field(1.0, 2.0, &spin);
        assert_eq!(f, (0.0, 0.0, 0.0));
        // generic point is not an equilibrium
        let generic = AxiPoint {
            q1: 0.3f64,
            p1: 0.0,
            p_sq: 5.0,
        };
        let (_, p1_dot, _) = axi_vector_field(1.0, 2.0, &generic);
        assert!(p1_dot.abs() > 0.1);
    }

    #[test]
    fn closed_form_matches_rk4() {
        let (j1, j2) = (1.0f64, 2.0f64);
        assert_abs_diff_eq!(axi_frequency(j1, j2, 3.0), 2.0f64.sqrt(), epsilon = 1e-15);
        // h = 0: constants
        let (q1, p1) = axi_closed_form(j1, j2, 0.0, 0.4, 0.7, 5.0);
        assert_eq!((q1, p1), (0.4, 0.0));

        // start inside the canoe, compare RK4 with the closed form
        let p_sq = 2.0;
        let a0 = AxiPoint {
            q1: 0.5,
            p1: 0.6,
            p_sq,
        };
        let h = axi_hamiltonian(j1, j2, &a0);
        let omega = axi_frequency(j1, j2, h);
        let c1 = a0.q1;
        let c2 = a0.p1 / ((j1 + j2) * omega);
        let period = 2.0 * core::f64::consts::PI / omega;
        let steps = 4000usize;
        let dt = period / steps as f64;
        let mut q1 = a0.q1;
        let mut p1 = a0.p1;
        let mut worst: f64 = 0.0;
        for k in 0..steps {
            let f = |q: f64, p: f64| {
                let a = AxiPoint { q1: q, p1: p, p_sq };
                let (dq, dp, _) = axi_vector_field(j1, j2, &a);
                (dq, dp)
            };
            let (k1q, k1p) = f(q1, p1);
            let (k2q, k2p) = f(q1 + 0.5 * dt * k1q, p1 + 0.5 * dt * k1p);
            let (k3q, k3p) = f(q1 + 0.5 * dt * k2q, p1 + 0.5 * dt * k2p);
            let (k4q, k4p) = f(q1 + dt * k3q, p1 + dt * k3p);
            q1 += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
            p1 += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            let t = (k + 1) as f64 * dt;
            let (qc, pc) = axi_closed_form(j1, j2, h, c1, c2, t);
            worst = worst.max((q1 - qc).abs()).max((p1 - pc).abs());
        }
        assert!(worst < 1e-9, "closed form vs RK4 worst deviation {worst:e}");
        // one full period returns to the start
        let (qf, pf) = axi_closed_form(j1, j2, h, c1, c2, period);
        assert_abs_diff_eq!(qf, a0.q1, epsilon = 1e-12);
        assert_abs_diff_eq!(pf, a0.p1, epsilon = 1e-12);
    }

    #[test]
    fn energy_is_constant_along_closed_form() {
        let (j1, j2) = (1.0f64, 3.0f64);
        let a0 = AxiPoint {
            q1: -0.4,
            p1: 0.5,
            p_sq: 3.0,
        };
        let h = axi_hamiltonian(j1, j2, &a0);
        let omega = axi_frequency(j1, j2, h);
        let c1 = a0.q1;
        let c2 = a0.p1 / ((j1 + j2) * omega);
        for k in 0..50 {
            let t = 0.13 * k as f64;
            let (q1, p1) = axi_closed_form(j1, j2, h, c1, c2, t);
            let a = AxiPoint {
                q1,
                p1,
                p_sq: a0.p_sq,
            };
            assert_abs_diff_eq!(axi_hamiltonian(j1, j2, &a), h, epsilon = 1e-12);
            assert!(a.violation() <= 1e-12 * a.p_sq.max(1.0), "leaves the canoe");
            // strata invariance: interior stays interior
            assert_eq!(axi_stratum(&a, stratum_tol()).unwrap().tag, StratumTag::S3);
        }
    }

    #[test]
    fn energy_wedge_bounds() {
        // P/(4J₂) ≤ H ≤ P/(2(J₁+J₂)) for J₁ < J₂
        let (j1, j2) = (1.0f64, 2.5f64);
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..200 {
            let q1: f64 = rng.random_range(-1.0..1.0);
            let p_sq: f64 = rng.random_range(0.0..5.0);
            let pmax = ((1.0 - q1 * q1) * p_sq).sqrt();
            let p1 = rng.random_range(-pmax..pmax.max(1e-12));
            let a = AxiPoint { q1, p1, p_sq };
            if a.violation() > 0.0 {
                continue;
            }
            let h = axi_hamiltonian(j1, j2, &a);
            assert!(h >= p_sq / (4.0 * j2) - 1e-12);
            assert!(h <= p_sq / (2.0 * (j1 + j2)) + 1e-12);
        }
    }

    #[test]
    fn moments_extraction() {
        let j = MassTensor::from_f64s(&[1.0, 2.0, 2.0, 2.0]).unwrap();
        let (j1, j2) = axi_moments(&j, 0, 1e-9).unwrap();
        assert_eq!((j1, j2), (1.0, 2.0));
        assert!(axi_moments(&j, 1, 1e-9).is_err());
        let generic = MassTensor::from_f64s(&[1.0, 2.0, 3.0]).unwrap();
        assert!(axi_moments(&generic, 0, 1e-9).is_err());
    }

    #[test]
    fn lift_round_trips_and_isotropy_rank_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let cases = vec![
            (AxiPoint { q1: 0.5, p1: 0.5, p_sq: 1.0 }, StratumTag::S3, 2usize),
            (AxiPoint { q1: 0.0, p1: 1.0, p_sq: 1.0 }, StratumTag::S2, 1),
            (AxiPoint { q1: 1.0, p1: 0.0, p_sq: 0.0 }, StratumTag::S0Prime, 0),
            (AxiPoint { q1: -1.0, p1: 0.0, p_sq: 0.0 }, StratumTag::S0, 0),
        ];
        for (a, tag, rank) in cases {
            for n in [3usize, 4, 5] {
                let s = axi_lift(&a, n).unwrap();
                let back = axi_invariants(&s, 0);
                assert_abs_diff_eq!(back.q1, a.q1, epsilon = 1e-12);
                assert_abs_diff_eq!(back.p1, a.p1, epsilon = 1e-12);
                assert_abs_diff_eq!(back.p_sq, a.p_sq, epsilon = 1e-12);
                assert_eq!(axi_stratum(&back, stratum_tol()).unwrap().tag, tag);
                // isotropy oracle: the rank of the tails {q_tail, p_tail}
                // equals the isotropy drop of the stratum
                let (_, q_tail) = s.q().split(1);
                let (_, p_tail) = s.p().split(1);
                let measured = (0..=2)
                    .rev()
                    .find(|&k| orthonormalize(&[q_tail.clone(), p_tail.clone()], k, 1e-8).is_some())
                    .unwrap();
                assert_eq!(measured, rank, "stratum {tag:?} lift in n={n}");
            }
        }
        // random interior lifts stay valid states
        for _ in 0..20 {
            let q1: f64 = rng.random_range(-0.9..0.9);
            let p_sq: f64 = rng.random_range(0.1..4.0);
            let pmax = ((1.0 - q1 * q1) * p_sq).sqrt();
            let p1 = rng.random_range(-0.9 * pmax..0.9 * pmax);
            let a = AxiPoint { q1, p1, p_sq };
            let s = axi_lift(&a, 4).unwrap();
            let back = axi_invariants(&s, 0);
            assert_abs_diff_eq!(back.p_sq, p_sq, epsilon = 1e-12);
        }
    }
}
