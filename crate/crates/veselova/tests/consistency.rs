//! Cross-module consistency checks: properties that tie two layers of the
//! tower together (full ↔ reduced ↔ second reductions ↔ reconstruction)
//! and therefore do not belong to any single module's unit tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use veselova::axisymmetric::{axi_invariants, axi_lift, axi_stratum, stratum_tol, AxiPoint};
use veselova::body::{default_eigen_tol, MassTensor};
use veselova::cylindrical::{
    cyl_equilibrium, cyl_hamiltonian, cyl_invariants, cyl_lift, cyl_period, integrate_cyl,
    CylClosedForm, CylPoint,
};
use veselova::full::{integrate_full, project_to_reduced, transform_state, FullState};
use veselova::full::random_e1_stabilizer;
use veselova::reconstruct::reconstruct_3d;
use veselova::reduced::{integrate_reduced, IntegratorOptions, ReducedState};
use veselova::strata::StratumTag;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn opts(dt: f64, steps: usize, stride: usize) -> IntegratorOptions<f64> {
    IntegratorOptions {
        dt,
        steps,
        stride,
        energy_guard: 1e-6,
    }
}

/// Projecting the full flow must reproduce the reduced flow of the
/// projected start: the bundle projection is a semiconjugacy.
#[test]
fn full_flow_projects_onto_the_reduced_flow() {
    let mut r = rng(11);
    for diag in [vec![1.0, 2.0, 3.0], vec![0.8, 1.4, 2.1, 2.9]] {
        let j = MassTensor::<f64>::from_f64s(&diag).unwrap();
        let n = diag.len();
        let s0 = FullState::<f64>::random_admissible(n, 1.0, &mut r);
        let o = opts(1e-3, 8000, 20);
        let full = integrate_full(&j, &s0, &o).unwrap();
        let reduced = integrate_reduced(&j, &project_to_reduced(&j, &s0).unwrap(), &o).unwrap();
        let mut worst = 0.0f64;
        for (fs, rs) in full.states.iter().zip(&reduced.states) {
            let pr = project_to_reduced(&j, fs).unwrap();
            worst = worst
                .max(pr.q().sub(rs.q()).norm())
                .max(pr.p().sub(rs.p()).norm());
        }
        assert!(worst < 1e-7, "semiconjugacy defect {worst:e} for J={diag:?}");
    }
}

/// The full flow commutes with both symmetry actions: the left stabilizer
/// of the distinguished axis and the right body-symmetry group.
#[test]
fn full_flow_commutes_with_both_symmetry_actions() {
    let mut r = rng(22);
    let j = MassTensor::<f64>::from_f64s(&[1.0, 1.6, 1.6, 2.3]).unwrap();
    let s0 = FullState::<f64>::random_admissible(4, 1.0, &mut r);
    let a = random_e1_stabilizer::<f64, _>(4, &mut r);
    let b = j.random_symmetry_element(default_eigen_tol::<f64>(), &mut r);
    let o = opts(1e-3, 3000, 50);

    let flow_then_map = integrate_full(&j, &s0, &o).unwrap();
    let mapped_start = transform_state(&s0, &a, &b).unwrap();
    let map_then_flow = integrate_full(&j, &mapped_start, &o).unwrap();

    let mut worst = 0.0f64;
    for (fs, ms) in flow_then_map.states.iter().zip(&map_then_flow.states) {
        let mapped = transform_state(fs, &a, &b).unwrap();
        let n = 4;
        for i in 0..n {
            for k in 0..n {
                worst = worst
                    .max((mapped.g().matrix()[(i, k)] - ms.g().matrix()[(i, k)]).abs());
            }
        }
        worst = worst.max(mapped.omega().sub(ms.omega()).norm());
    }
    assert!(worst < 1e-9, "equivariance defect {worst:e}");
}

/// For a cylindrical body the invariants of the reduced flow follow the
/// cone flow: the second reduction is a semiconjugacy too.
#[test]
fn reduced_flow_projects_onto_the_cone_flow() {
    let (j1, j2) = (1.0f64, 2.0f64);
    let j = MassTensor::<f64>::from_f64s(&[1.0, 1.0, 2.0, 2.0]).unwrap();
    let c0 = CylPoint {
        a: 0.55,
        b: 2.4,
        p_sq: 6.0,
        d: 0.05,
    };
    let s0 = cyl_lift(&c0, 2, 4).unwrap();
    let o = opts(1e-3, 8000, 20);
    let upstairs = integrate_reduced(&j, &s0, &o).unwrap();
    let downstairs = integrate_cyl(j1, j2, &c0, &o).unwrap();
    let mut worst = 0.0f64;
    for (rs, c) in upstairs.states.iter().zip(&downstairs.points) {
        let inv = cyl_invariants(rs, 2).unwrap();
        worst = worst
            .max((inv.a - c.a).abs())
            .max((inv.b - c.b).abs())
            .max((inv.p_sq - c.p_sq).abs())
            .max((inv.d - c.d).abs());
    }
    assert!(worst < 1e-7, "cone semiconjugacy defect {worst:e}");
}

/// Canoe strata are invariant under the reduced flow of an axisymmetric
/// body: interior orbits stay interior, surface orbits stay on the surface.
#[test]
fn canoe_strata_are_flow_invariant() {
    let j = MassTensor::<f64>::from_f64s(&[1.0, 2.0, 2.0]).unwrap();
    let o = opts(1e-3, 20_000, 100);

    let interior = AxiPoint { q1: 0.3, p1: 0.4, p_sq: 2.0 };
    let traj = integrate_reduced(&j, &axi_lift(&interior, 3).unwrap(), &o).unwrap();
    for s in &traj.states {
        let tag = axi_stratum(&axi_invariants(s, 0), stratum_tol::<f64>())
            .unwrap()
            .tag;
        assert_eq!(tag, StratumTag::S3, "interior orbit left its stratum");
    }

    let on_surface = AxiPoint {
        q1: 0.3,
        p1: ((1.0 - 0.09f64) * 2.0).sqrt(),
        p_sq: 2.0,
    };
    let traj = integrate_reduced(&j, &axi_lift(&on_surface, 3).unwrap(), &o).unwrap();
    for s in &traj.states {
        let tag = axi_stratum(&axi_invariants(s, 0), stratum_tol::<f64>())
            .unwrap()
            .tag;
        assert_eq!(tag, StratumTag::S2, "surface orbit left its stratum");
    }
}

/// Along cylindrical orbits the time averages of (A, B, D) over whole
/// periods equal the orbit's own ellipse centre (A*, B̄, 0), and the
/// A-average moreover equals the equilibrium A* of the same (h, P) —
/// the oscillation is exactly harmonic about that axis. (The B-centre
/// genuinely differs from the equilibrium B* at second order in the
/// amplitude, because the energy level set is curved in D.)
#[test]
fn cone_orbit_averages_sit_at_the_orbit_centre() {
    let (j1, j2) = (1.0f64, 2.0f64);
    let c0 = CylPoint {
        a: 0.56,
        b: 2.4,
        p_sq: 6.0,
        d: 0.03,
    };
    let h = cyl_hamiltonian(j1, j2, &c0);
    let cf = CylClosedForm::from_point(j1, j2, &c0).unwrap();
    let eq = cyl_equilibrium(j1, j2, h, c0.p_sq).unwrap().unwrap();
    let periods = 4.0f64;
    let n = 40_000usize;
    let dt = periods * cyl_period(j1, j2, h) / n as f64;
    let traj = integrate_cyl(j1, j2, &c0, &opts(dt, n, 1)).unwrap();
    // averaging over exactly `periods` full oscillations: drop the final
    // sample, which duplicates the phase of the first
    let m = n as f64;
    let (mut ma, mut mb, mut md) = (0.0f64, 0.0f64, 0.0f64);
    for c in &traj.points[..n] {
        ma += c.a;
        mb += c.b;
        md += c.d;
    }
    let (ma, mb, md) = (ma / m, mb / m, md / m);
    assert!(
        (cf.a_star - eq.a).abs() < 1e-12,
        "orbit A-centre {:.12} vs equilibrium {:.12}",
        cf.a_star,
        eq.a
    );
    assert!(
        (ma - cf.a_star).abs() < 1e-8,
        "mean A {ma:.12} vs centre {:.12}",
        cf.a_star
    );
    assert!(
        (mb - cf.b_star).abs() < 1e-8,
        "mean B {mb:.12} vs centre {:.12}",
        cf.b_star
    );
    assert!(md.abs() < 1e-8, "mean D {md:.2e}");
}

/// Reconstruction and projection are mutually inverse along reduced
/// trajectories of the 3-dimensional problem.
#[test]
fn reconstruction_round_trips_through_the_projection() {
    let mut r = rng(33);
    let j = MassTensor::<f64>::from_f64s(&[1.0, 2.0, 3.0]).unwrap();
    let s0 = ReducedState::<f64>::project_f64s(&[0.6, 0.8, 0.0], &[0.4, -0.3, 1.3]).unwrap();
    let traj = integrate_reduced(&j, &s0, &opts(1e-3, 4000, 10)).unwrap();

    // the gauge is the residual freedom fixing the distinguished axis
    let g0 = random_e1_stabilizer::<f64, _>(3, &mut r);

    let full = reconstruct_3d(&j, &traj.states, &g0).unwrap();
    assert_eq!(full.len(), traj.states.len());
    let mut worst = 0.0f64;
    for (fs, rs) in full.iter().zip(&traj.states) {
        let back = project_to_reduced(&j, fs).unwrap();
        worst = worst
            .max(back.q().sub(rs.q()).norm())
            .max(back.p().sub(rs.p()).norm());
    }
    assert!(worst < 1e-12, "round-trip defect {worst:e}");
}
