//! The `verify` mode: a battery of invariant checks against the body named in
//! the configuration.
//!
//! Each check produces a named value and a threshold; the run passes exactly
//! when every check passes.  The checks cover the algebra layer (exponentials,
//! the wedge pairing), the body model (self-adjointness of the mass tensor
//! action), the constrained flow (conservation, multipliers, steady rotations,
//! the invariant measure), the energy–momentum map, stability of extremal
//! rotations, the field-extension criterion, both symmetry reductions against
//! their closed-form solutions, attitude reconstruction, and the frequency
//! extractor on a planted signal.

use std::f64::consts::PI;

use rand::Rng;

use veselova::axisymmetric::{
    axi_closed_form, axi_frequency, axi_hamiltonian, axi_invariants, axi_lift, AxiPoint,
};
use veselova::body::{default_eigen_tol, MassTensor, PrincipalPlane};
use veselova::cylindrical::{integrate_cyl, CylClosedForm, CylPoint};
use veselova::full::{
    integrate_full, measure_rotation_period, project_to_reduced, solve_multipliers,
    steady_rotation_state, FullState,
};
use veselova::linalg::{OrthogonalMatrix, Vector};
use veselova::reconstruct::reconstruct_3d;
use veselova::reduced::{
    divergence_residual_constant_density, hamiltonian_reduced, integrate_reduced,
    measure_divergence_residual, IntegratorOptions, ReducedState,
};
use veselova::seeded_rng;
use veselova::skew::SkewMatrix;
use veselova::spectrum::{frequency_analysis, FrequencySpectrum, SpectrumOptions};
use veselova::stability::{stability_hessian, stability_hessian_fd, StabilityVerdict};

use crate::config::ExperimentConfig;
use crate::report::{CheckReport, RunReport};
use crate::run::RunOutcome;

type MT = MassTensor<f64>;

/// Runs every applicable check for the configured body and collects the
/// results into a report.  The outcome carries an invariant-violation failure
/// when any check fails.
pub fn run_verify(cfg: &ExperimentConfig) -> crate::CliResult<RunOutcome> {
    let j = cfg.mass_tensor()?;
    let n = cfg.dimension;
    let seed = cfg.initial.seed().unwrap_or(0);
    let mut rng = seeded_rng(seed);

    let mut report = RunReport::new("verify", n, &cfg.mass);
    let mut checks: Vec<CheckReport> = Vec::new();

    algebra_checks(n, &mut rng, &mut checks);
    body_checks(&j, &mut rng, &mut checks);
    let full_start = conservation_checks(&j, &mut rng, &mut checks)?;
    steady_rotation_checks(&j, &mut checks)?;
    measure_checks(&j, &mut rng, &mut checks);
    wedge_checks(&j, &mut rng, &mut checks);
    stability_checks(&j, &mut checks)?;
    field_extension_checks(&j, &mut rng, &mut checks)?;
    if let Some((j1, j2)) = cfg.axi_split {
        axi_checks(j1, j2, n, &mut checks)?;
    }
    if let Some((j1, j2, _)) = cfg.cyl_split {
        cyl_checks(j1, j2, &mut checks)?;
    }
    if n == 3 {
        reconstruction_checks(&j, &full_start, &mut checks)?;
    }
    spectrum_checks(&mut checks)?;

    let failure = checks.iter().find(|c| !c.pass).map(|c| {
        crate::CliError::Invariant(format!(
            "check `{}` failed: value {:.6e} exceeds bound {:.1e}",
            c.name, c.value, c.threshold
        ))
    });
    report.checks = checks;
    Ok(RunOutcome { report, failure })
}

fn boolean(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

/// Exponentials of rank-2 generators land in the orthogonal group, and the
/// trace pairing of two wedges factors through the Gram determinant.
fn algebra_checks<R: Rng + ?Sized>(n: usize, rng: &mut R, checks: &mut Vec<CheckReport>) {
    let mut worst_orth = 0.0_f64;
    let mut worst_pair = 0.0_f64;
    for _ in 0..12 {
        let a = Vector::<f64>::standard_normal(n, rng);
        let b = Vector::<f64>::standard_normal(n, rng);
        let c = Vector::<f64>::standard_normal(n, rng);
        let d = Vector::<f64>::standard_normal(n, rng);
        let w = SkewMatrix::wedge(&a, &b);
        let t: f64 = rng.random_range(-3.0..3.0);
        if let Ok(g) = w.exp_rank2(t) {
            let m = g.matrix();
            for i in 0..n {
                for k in 0..n {
                    let mut dot = 0.0;
                    for l in 0..n {
                        dot += m[(l, i)] * m[(l, k)];
                    }
                    let expect = if i == k { 1.0 } else { 0.0 };
                    worst_orth = worst_orth.max((dot - expect).abs());
                }
            }
        }
        let lhs = w.pairing(&SkewMatrix::wedge(&c, &d));
        let rhs = a.dot(&c) * b.dot(&d) - a.dot(&d) * b.dot(&c);
        worst_pair = worst_pair.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    checks.push(CheckReport::new("exp-orthogonality", worst_orth, 1e-12));
    checks.push(CheckReport::new("wedge-pairing-identity", worst_pair, 1e-12));
}

/// The mass tensor acts self-adjointly for the trace pairing.
fn body_checks<R: Rng + ?Sized>(j: &MT, rng: &mut R, checks: &mut Vec<CheckReport>) {
    let n = j.dim();
    let mut worst = 0.0_f64;
    for _ in 0..12 {
        let x = SkewMatrix::wedge(
            &Vector::<f64>::standard_normal(n, rng),
            &Vector::<f64>::standard_normal(n, rng),
        );
        let y = SkewMatrix::wedge(
            &Vector::<f64>::standard_normal(n, rng),
            &Vector::<f64>::standard_normal(n, rng),
        );
        let lhs = j.inertia_apply(&x).pairing(&y);
        let rhs = x.pairing(&j.inertia_apply(&y));
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    checks.push(CheckReport::new("inertia-self-adjoint", worst, 1e-12));
}

/// Long integrations of the full and reduced flows keep their conserved
/// quantities flat and the full flow on the constraint set.
fn conservation_checks<R: Rng + ?Sized>(
    j: &MT,
    rng: &mut R,
    checks: &mut Vec<CheckReport>,
) -> crate::CliResult<FullState<f64>> {
    let n = j.dim();
    let s0 = FullState::random_admissible(n, 1.0, rng);
    let opts = IntegratorOptions {
        dt: 1e-3,
        steps: 20_000,
        stride: 100,
        energy_guard: 1e-6,
    };
    let traj = integrate_full(j, &s0, &opts)?;
    checks.push(CheckReport::new(
        "full-energy-drift",
        traj.max_energy_drift,
        1e-8,
    ));
    checks.push(CheckReport::new(
        "full-momentum-drift",
        traj.max_momentum_drift,
        1e-8,
    ));
    checks.push(CheckReport::new(
        "full-constraint-residual",
        traj.max_constraint_residual,
        1e-10,
    ));
    checks.push(CheckReport::new(
        "full-orthogonality",
        traj.max_orthogonality_error,
        1e-10,
    ));

    let r0 = project_to_reduced(j, &s0)?;
    let rtraj = integrate_reduced(j, &r0, &opts)?;
    checks.push(CheckReport::new(
        "reduced-energy-drift",
        rtraj.max_energy_drift,
        1e-8,
    ));
    checks.push(CheckReport::new(
        "reduced-momentum-drift",
        rtraj.max_momentum_drift,
        1e-8,
    ));
    Ok(s0)
}

/// Uniform rotations in a principal plane: the constraint multipliers vanish
/// along the exact orbit, and the measured period of the axis trace matches
/// the rotation speed.
fn steady_rotation_checks(j: &MT, checks: &mut Vec<CheckReport>) -> crate::CliResult<()> {
    let n = j.dim();
    let speed = 2.0_f64;
    let plane = PrincipalPlane {
        axes: (0, 1),
        moment: j.plane_moment(0, 1),
    };
    let s0 = steady_rotation_state(j, &plane, speed)?;

    let mut worst_lambda = 0.0_f64;
    for k in 0..50 {
        let t = 0.07 * k as f64;
        let g = s0.g().mul(&s0.omega().exp_rank2(t)?);
        let st = FullState::try_new(g, s0.omega().clone())?;
        let mult = solve_multipliers(j, &st)?;
        worst_lambda = worst_lambda.max(mult.lambda.max_abs());
    }
    checks.push(CheckReport::new(
        "steady-rotation-multipliers",
        worst_lambda,
        1e-12,
    ));

    let period = 2.0 * PI / speed.abs();
    let opts = IntegratorOptions {
        dt: 1e-3,
        steps: (1.25 * period / 1e-3).ceil() as usize,
        stride: 1,
        energy_guard: 1e-6,
    };
    let traj = integrate_full(j, &s0, &opts)?;
    let qs: Vec<Vector<f64>> = traj
        .states
        .iter()
        .map(|s| project_to_reduced(j, s).map(|r| r.q().clone()))
        .collect::<veselova::Result<_>>()?;
    let measured = measure_rotation_period(
        &traj.times,
        &qs,
        &Vector::basis(n, 0),
        &Vector::basis(n, 1),
    )?;
    checks.push(CheckReport::new(
        "steady-rotation-period",
        (measured - period).abs() / period,
        1e-6,
    ));

    let r0 = project_to_reduced(j, &s0)?;
    let h = hamiltonian_reduced(j, &r0);
    let p = r0.p().norm_sq();
    checks.push(CheckReport::new(
        "steady-rotation-em-ray",
        (p - 2.0 * plane.moment * h).abs() / p.max(1.0),
        1e-12,
    ));
    Ok(())
}

/// The configured measure density is flow-invariant, and — when every moment
/// is distinct — the constant density is demonstrably not.
fn measure_checks<R: Rng + ?Sized>(j: &MT, rng: &mut R, checks: &mut Vec<CheckReport>) {
    let n = j.dim();
    let mut worst = 0.0_f64;
    for _ in 0..30 {
        let s = ReducedState::random(n, 1.2, rng);
        worst = worst.max(measure_divergence_residual(j, &s, 1e-5).abs());
    }
    checks.push(CheckReport::new("measure-divergence", worst, 1e-6));

    if j.eigen_groups(default_eigen_tol()).len() == n {
        let mut hits = 0usize;
        let total = 50usize;
        for _ in 0..total {
            let s = ReducedState::random(n, 1.2, rng);
            if divergence_residual_constant_density(j, &s, 1e-5).abs() > 1e-3 {
                hits += 1;
            }
        }
        checks.push(CheckReport::new(
            "measure-control-fraction",
            1.0 - hits as f64 / total as f64,
            0.1,
        ));
    }
}

/// Every admissible state lands inside the energy–momentum wedge.
fn wedge_checks<R: Rng + ?Sized>(j: &MT, rng: &mut R, checks: &mut Vec<CheckReport>) {
    let n = j.dim();
    let mut violations = 0usize;
    for _ in 0..2000 {
        let s = ReducedState::random(n, 1.5, rng);
        if !veselova::reduced::em_map(j, &s).in_wedge(j, 1e-9) {
            violations += 1;
        }
    }
    checks.push(CheckReport::new(
        "em-wedge-violations",
        violations as f64,
        0.0,
    ));
}

/// Rotations in the extremal principal planes are certified stable, and the
/// closed-form transverse Hessian agrees with a finite-difference probe.
fn stability_checks(j: &MT, checks: &mut Vec<CheckReport>) -> crate::CliResult<()> {
    let (mins, maxs) = j.extremal_planes();
    let omega = 2.0_f64;
    for (tag, plane) in [("min", &mins[0]), ("max", &maxs[0])] {
        let closed = stability_hessian(j, plane, omega, default_eigen_tol())?;
        let fd = stability_hessian_fd(j, plane, omega, 1e-3)?;
        let diag = closed.diagonal();
        let mut err = 0.0_f64;
        for (c, f) in diag.iter().zip(fd.iter()) {
            err = err.max((c - f).abs() / c.abs().max(1.0));
        }
        checks.push(CheckReport::new(
            &format!("stability-fd-agreement-{tag}"),
            err,
            1e-6,
        ));
        checks.push(CheckReport::new(
            &format!("stability-verdict-{tag}"),
            boolean(closed.verdict == StabilityVerdict::Stable),
            0.0,
        ));
    }
    Ok(())
}

/// The quadratic-conservation system: either its solution checks out on
/// random data, or infeasibility is witnessed by a rank-2 breaking direction.
fn field_extension_checks<R: Rng + ?Sized>(
    j: &MT,
    rng: &mut R,
    checks: &mut Vec<CheckReport>,
) -> crate::CliResult<()> {
    match j.fj_matrix() {
        Ok(a) => {
            let res = j.fj_condition_residual(&a, 100, rng);
            checks.push(CheckReport::new("fj-condition-residual", res, 1e-12));
        }
        Err(_) => {
            let witness = j.rank2_preservation_witness()?;
            checks.push(CheckReport::new(
                "fj-infeasibility-witnessed",
                boolean(witness.abs() > 1e-6),
                0.0,
            ));
        }
    }
    Ok(())
}

/// In the axisymmetric reduction, orbits follow the harmonic closed form.
fn axi_checks(j1: f64, j2: f64, n: usize, checks: &mut Vec<CheckReport>) -> crate::CliResult<()> {
    let a0 = AxiPoint {
        q1: 0.3,
        p1: 0.4,
        p_sq: 2.0,
    };
    let h = axi_hamiltonian(j1, j2, &a0);
    let om = axi_frequency(j1, j2, h);
    let c1 = a0.q1;
    let c2 = a0.p1 / ((j1 + j2) * om);
    let period = 2.0 * PI / om;
    let steps = 4096usize;
    let opts = IntegratorOptions {
        dt: period / steps as f64,
        steps,
        stride: 8,
        energy_guard: 1e-6,
    };
    let lift = axi_lift(&a0, n)?;
    let j = MassTensor::try_new({
        let mut m = vec![j2; n];
        m[0] = j1;
        m
    })?;
    let traj = integrate_reduced(&j, &lift, &opts)?;
    let mut worst = 0.0_f64;
    for (t, s) in traj.times.iter().zip(traj.states.iter()) {
        let a = axi_invariants(s, 0);
        let (q1, p1) = axi_closed_form(j1, j2, h, c1, c2, *t);
        worst = worst.max((a.q1 - q1).abs()).max((a.p1 - p1).abs());
    }
    checks.push(CheckReport::new("axi-closed-form", worst, 1e-9));
    Ok(())
}

/// In the two-block reduction, orbits follow the explicit harmonic solution
/// on the cone and conserve the quartic invariant.
fn cyl_checks(j1: f64, j2: f64, checks: &mut Vec<CheckReport>) -> crate::CliResult<()> {
    let c0 = CylPoint {
        a: 0.55,
        b: 2.4,
        p_sq: 6.0,
        d: 0.05,
    };
    let cf = CylClosedForm::from_point(j1, j2, &c0)?;
    let opts = IntegratorOptions {
        dt: 1e-3,
        steps: 4000,
        stride: 10,
        energy_guard: 1e-6,
    };
    let traj = integrate_cyl(j1, j2, &c0, &opts)?;
    let mut worst = 0.0_f64;
    for (t, c) in traj.times.iter().zip(traj.points.iter()) {
        let e = cf.eval(*t);
        worst = worst
            .max((c.a - e.a).abs())
            .max((c.b - e.b).abs())
            .max((c.d - e.d).abs());
    }
    checks.push(CheckReport::new("cyl-closed-form", worst, 1e-9));
    checks.push(CheckReport::new("cyl-f-drift", traj.max_f_drift, 1e-10));
    Ok(())
}

/// In three dimensions, reconstructing the attitude from a reduced orbit and
/// projecting back is the identity.
fn reconstruction_checks(
    j: &MT,
    s0: &FullState<f64>,
    checks: &mut Vec<CheckReport>,
) -> crate::CliResult<()> {
    let r0 = project_to_reduced(j, s0)?;
    let opts = IntegratorOptions {
        dt: 1e-3,
        steps: 2000,
        stride: 10,
        energy_guard: 1e-6,
    };
    let traj = integrate_reduced(j, &r0, &opts)?;
    let full = reconstruct_3d(j, &traj.states, &OrthogonalMatrix::identity(3))?;
    let mut worst = 0.0_f64;
    for (fs, rs) in full.iter().zip(traj.states.iter()) {
        let back = project_to_reduced(j, fs)?;
        worst = worst
            .max(back.q().sub(rs.q()).max_abs())
            .max(back.p().sub(rs.p()).max_abs());
    }
    checks.push(CheckReport::new("reconstruction-round-trip", worst, 1e-10));
    Ok(())
}

/// The frequency extractor recovers a planted two-line spectrum.
fn spectrum_checks(checks: &mut Vec<CheckReport>) -> crate::CliResult<()> {
    let dt = 0.05_f64;
    let nsamp = 8192usize;
    let (w1, w2) = (1.234_f64, 2.711_f64);
    let chan: Vec<f64> = (0..nsamp)
        .map(|k| {
            let t = k as f64 * dt;
            (w1 * t).cos() + 0.7 * (w2 * t + 0.4).cos()
        })
        .collect();
    let spec: FrequencySpectrum<f64> =
        frequency_analysis(&[chan], dt, &SpectrumOptions::default())?;
    checks.push(CheckReport::new(
        "spectrum-base-count",
        boolean(spec.base.len() == 2),
        0.0,
    ));
    let mut err = 0.0_f64;
    for w in [w1, w2] {
        let best = spec
            .base
            .iter()
            .map(|b| (b - w).abs())
            .fold(f64::INFINITY, f64::min);
        err = err.max(best);
    }
    checks.push(CheckReport::new("spectrum-planted-frequency-error", err, 1e-3));
    Ok(())
}
