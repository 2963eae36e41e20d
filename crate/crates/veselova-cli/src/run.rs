//! Experiment orchestration: resolves initial conditions, integrates (one
//! worker thread per trajectory in batch mode), and emits CSV files plus a
//! versioned JSON report. The orchestrator owns all file I/O and report
//! state; workers receive immutable inputs and hand results back over a
//! channel.

use std::sync::{mpsc, Arc};
use std::time::Instant;

use rand::Rng;

use veselova::axisymmetric::{
    axi_hamiltonian, axi_invariants, axi_lift, axi_stratum, AxiPoint,
};
use veselova::body::{MassTensor, PrincipalPlane};
use veselova::cylindrical::{
    cyl_equilibrium, cyl_hamiltonian, cyl_stratum, integral_f, integrate_cyl, CylPoint,
};
use veselova::full::{integrate_full, project_to_reduced, steady_rotation_state, FullState};
use veselova::linalg::Vector;
use veselova::presets::SpectrumPreset;
use veselova::reconstruct::{axis_cylinder_residual, axis_trace_from_reduced, CylReleq};
use veselova::reduced::{
    em_map, hamiltonian_reduced, integrate_reduced, measure_density, IntegratorOptions,
    ReducedState,
};
use veselova::seeded_rng;

use crate::config::{build_full_state, ExperimentConfig, Initial, Mode};
use crate::emit::{axi_columns, cyl_columns, full_columns, reduced_columns, Csv};
use crate::report::{CheckReport, RayReport, RunReport, SpectrumReport, TrajectoryReport};
use crate::{CliError, CliResult};

/// A finished run: the report has been written; `failure` carries an
/// invariant violation detected during the run (exit 3), distinct from
/// hard errors which abort earlier.
pub struct RunOutcome {
    pub report: RunReport,
    pub failure: Option<CliError>,
}

/// Executes the configured mode, writing all outputs under
/// `cfg.out_dir`. Returns the report; invariant violations are deferred
/// into the outcome so the report is always written first.
pub fn run(cfg: &ExperimentConfig) -> CliResult<RunOutcome> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let started = Instant::now();
    let mut outcome = match cfg.mode {
        Mode::Full | Mode::Reduced | Mode::Axi | Mode::Cyl => simulate(cfg, false)?,
        Mode::Verify => crate::verify::run_verify(cfg)?,
        Mode::EmMap => em_map_mode(cfg)?,
        Mode::Spectrum => spectrum_mode(cfg)?,
        Mode::AxisTrace => axis_trace_mode(cfg)?,
    };
    outcome.report.wall_time_s = started.elapsed().as_secs_f64();
    if !outcome.report.drifts_finite() {
        return Err(CliError::Numeric(
            "a reported drift or residual is not finite".into(),
        ));
    }
    outcome.report.write_json(&cfg.out_dir.join("report.json"))?;
    Ok(outcome)
}

/// The strata subcommand: like simulate for axi/cyl configs, but the CSV
/// carries only `t, stratum` and the report histograms the tags.
pub fn run_strata(cfg: &ExperimentConfig) -> CliResult<RunOutcome> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let started = Instant::now();
    let mut outcome = simulate(cfg, true)?;
    outcome.report.wall_time_s = started.elapsed().as_secs_f64();
    outcome.report.write_json(&cfg.out_dir.join("report.json"))?;
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// Trajectory simulation
// ---------------------------------------------------------------------------

/// One trajectory's initial state, resolved.
#[derive(Clone, Debug)]
enum Start {
    Full(FullState<f64>),
    Reduced(ReducedState<f64>),
    Axi(AxiPoint<f64>),
    Cyl(CylPoint<f64>),
}

fn integrator_options(cfg: &ExperimentConfig) -> IntegratorOptions<f64> {
    IntegratorOptions {
        dt: cfg.dt,
        steps: cfg.steps,
        stride: cfg.stride,
        energy_guard: cfg.energy_guard,
    }
}

fn plane_of(j: &MassTensor<f64>, axes: (usize, usize)) -> PrincipalPlane<f64> {
    PrincipalPlane {
        axes,
        moment: j.plane_moment(axes.0, axes.1),
    }
}

fn resolve_starts(cfg: &ExperimentConfig, j: &MassTensor<f64>) -> CliResult<Vec<Start>> {
    let n = cfg.dimension;
    let releq = |h: f64, p_sq: f64| -> CliResult<CylReleq<f64>> {
        let (j1, j2, _) = cfg
            .cyl_split
            .expect("validation guarantees a cylindrical split for cyl-releq");
        Ok(CylReleq::try_new(j1, j2, h, p_sq)?)
    };
    let starts = match (cfg.mode, &cfg.initial) {
        (Mode::Full, Initial::ExplicitFull { g, omega }) => {
            vec![Start::Full(build_full_state(n, g, omega)?)]
        }
        (Mode::Full, Initial::Random { seed, count }) => {
            let mut rng = seeded_rng(*seed);
            (0..*count)
                .map(|_| Start::Full(FullState::random_admissible(n, 1.0, &mut rng)))
                .collect()
        }
        (Mode::Full, Initial::SteadyRotation { plane, speed }) => vec![Start::Full(
            steady_rotation_state(j, &plane_of(j, *plane), *speed)?,
        )],
        (Mode::Full, Initial::CylReleq { h, p_sq }) => {
            vec![Start::Full(releq(*h, *p_sq)?.state_at(0.0)?)]
        }
        (Mode::Reduced | Mode::AxisTrace, Initial::ExplicitReduced { q, p }) => {
            vec![Start::Reduced(ReducedState::project_f64s(q, p)?)]
        }
        (Mode::Reduced | Mode::AxisTrace, Initial::Random { seed, count }) => {
            let mut rng = seeded_rng(*seed);
            (0..*count)
                .map(|_| Start::Reduced(ReducedState::random(n, 1.0, &mut rng)))
                .collect()
        }
        (Mode::Reduced | Mode::AxisTrace, Initial::SteadyRotation { plane, speed }) => {
            // project the full steady rotation so the sign of the speed
            // is honored
            let full = steady_rotation_state(j, &plane_of(j, *plane), *speed)?;
            vec![Start::Reduced(project_to_reduced(j, &full)?)]
        }
        (Mode::Reduced, Initial::CylReleq { h, p_sq }) => {
            vec![Start::Reduced(releq(*h, *p_sq)?.reduced_at(0.0)?)]
        }
        (Mode::Axi, Initial::ExplicitAxi { q1, p1, p_sq }) => vec![Start::Axi(AxiPoint {
            q1: *q1,
            p1: *p1,
            p_sq: *p_sq,
        })],
        (Mode::Axi, Initial::Random { seed, count }) => {
            let mut rng = seeded_rng(*seed);
            (0..*count)
                .map(|_| Start::Axi(sample_canoe(&mut rng)))
                .collect()
        }
        (Mode::Cyl, Initial::ExplicitCyl { a, b, p_sq, d }) => vec![Start::Cyl(CylPoint {
            a: *a,
            b: *b,
            p_sq: *p_sq,
            d: *d,
        })],
        (Mode::Cyl, Initial::Random { seed, count }) => {
            let mut rng = seeded_rng(*seed);
            (0..*count)
                .map(|_| Start::Cyl(sample_cone(&mut rng)))
                .collect()
        }
        (Mode::Cyl, Initial::CylReleq { h, p_sq }) => {
            let (j1, j2, _) = cfg.cyl_split.expect("validated cylindrical split");
            let center = cyl_equilibrium(j1, j2, *h, *p_sq)?.ok_or_else(|| {
                CliError::Numeric(format!(
                    "no relative equilibrium at (h = {h}, P = {p_sq})"
                ))
            })?;
            vec![Start::Cyl(center)]
        }
        (mode, init) => {
            return Err(CliError::Usage(format!(
                "initial condition {init:?} is not valid in {} mode",
                mode.name()
            )))
        }
    };
    Ok(starts)
}

/// Uniform draw from the interior of the canoe `p₁² ≤ (1−q₁²)P`.
fn sample_canoe<R: Rng + ?Sized>(rng: &mut R) -> AxiPoint<f64> {
    let q1: f64 = rng.random_range(-0.95..0.95);
    let p_sq: f64 = rng.random_range(0.2..4.0);
    let cap = ((1.0 - q1 * q1) * p_sq).sqrt();
    let p1 = rng.random_range(-0.98..0.98) * cap;
    AxiPoint { q1, p1, p_sq }
}

/// Uniform draw from the interior of the cone
/// `D² ≤ min(AB, (1−A)(P−B))`, `0 < A < 1`, `0 < B < P`.
fn sample_cone<R: Rng + ?Sized>(rng: &mut R) -> CylPoint<f64> {
    let a: f64 = rng.random_range(0.05..0.95);
    let p_sq: f64 = rng.random_range(0.5..8.0);
    let b = rng.random_range(0.05..0.95) * p_sq;
    let cap = (a * b).min((1.0 - a) * (p_sq - b)).max(0.0).sqrt();
    let d = rng.random_range(-0.98..0.98) * cap;
    CylPoint { a, b, p_sq, d }
}

/// Integrates one trajectory and renders its CSV. `tags_only` switches to
/// the strata emission (`t, stratum` columns).
fn run_one(
    cfg: &ExperimentConfig,
    j: &MassTensor<f64>,
    index: usize,
    start: Start,
    tags_only: bool,
) -> CliResult<(Vec<u8>, TrajectoryReport)> {
    let opts = integrator_options(cfg);
    let file = if tags_only {
        format!("strata_{index:03}.csv")
    } else {
        format!("traj_{index:03}.csv")
    };
    match start {
        Start::Full(s0) => {
            let traj = integrate_full(j, &s0, &opts)?;
            let mut csv = Csv::new(&full_columns(cfg.dimension));
            let mut row: Vec<f64> = Vec::new();
            for (t, s) in traj.times.iter().zip(&traj.states) {
                row.clear();
                row.push(*t);
                let m = s.g().matrix();
                for i in 0..cfg.dimension {
                    for k in 0..cfg.dimension {
                        row.push(m[(i, k)]);
                    }
                }
                row.extend_from_slice(s.omega().upper());
                row.push(s.energy(j));
                row.push(project_to_reduced(j, s)?.p().norm_sq());
                row.push(s.constraint_residuals().max_abs());
                csv.row(&row);
            }
            let rep = TrajectoryReport {
                index,
                csv: file,
                energy_drift: traj.max_energy_drift,
                momentum_drift: Some(traj.max_momentum_drift),
                f_drift: None,
                max_constraint_residual: Some(traj.max_constraint_residual),
                stratum_tags: Vec::new(),
            };
            Ok((csv.into_bytes(), rep))
        }
        Start::Reduced(s0) => {
            let traj = integrate_reduced(j, &s0, &opts)?;
            let mut csv = Csv::new(&reduced_columns(cfg.dimension));
            let mut row: Vec<f64> = Vec::new();
            for (t, s) in traj.times.iter().zip(&traj.states) {
                row.clear();
                row.push(*t);
                row.extend_from_slice(s.q().as_slice());
                row.extend_from_slice(s.p().as_slice());
                row.push(hamiltonian_reduced(j, s));
                row.push(s.p().norm_sq());
                row.push(measure_density(j, s.q()));
                csv.row(&row);
            }
            let rep = TrajectoryReport {
                index,
                csv: file,
                energy_drift: traj.max_energy_drift,
                momentum_drift: Some(traj.max_momentum_drift),
                f_drift: None,
                max_constraint_residual: None,
                stratum_tags: Vec::new(),
            };
            Ok((csv.into_bytes(), rep))
        }
        Start::Axi(a0) => {
            let (j1, j2) = cfg
                .axi_split
                .expect("validation guarantees axisymmetric moments in axi mode");
            let lifted = axi_lift(&a0, cfg.dimension)?;
            let traj = integrate_reduced(j, &lifted, &opts)?;
            let mut csv = Csv::new(&if tags_only {
                vec!["t".to_string(), "stratum".to_string()]
            } else {
                axi_columns()
            });
            let mut tags: Vec<String> = Vec::new();
            for (t, s) in traj.times.iter().zip(&traj.states) {
                let a = axi_invariants(s, 0);
                let tag = axi_stratum(&a, veselova::axisymmetric::stratum_tol::<f64>())?
                    .tag
                    .label();
                if !tags.iter().any(|x| x == tag) {
                    tags.push(tag.to_string());
                }
                if tags_only {
                    csv.row_tagged(&[*t], &[tag]);
                } else {
                    csv.row_tagged(
                        &[*t, a.q1, a.p1, a.p_sq, axi_hamiltonian(j1, j2, &a)],
                        &[tag],
                    );
                }
            }
            let rep = TrajectoryReport {
                index,
                csv: file,
                energy_drift: traj.max_energy_drift,
                momentum_drift: Some(traj.max_momentum_drift),
                f_drift: None,
                max_constraint_residual: None,
                stratum_tags: tags,
            };
            Ok((csv.into_bytes(), rep))
        }
        Start::Cyl(c0) => {
            let (j1, j2, _) = cfg
                .cyl_split
                .expect("validation guarantees a cylindrical split in cyl mode");
            let traj = integrate_cyl(j1, j2, &c0, &opts)?;
            let mut csv = Csv::new(&if tags_only {
                vec!["t".to_string(), "stratum".to_string()]
            } else {
                cyl_columns()
            });
            let mut tags: Vec<String> = Vec::new();
            for (t, c) in traj.times.iter().zip(&traj.points) {
                let tag = cyl_stratum(c, veselova::cylindrical::stratum_tol::<f64>())?
                    .tag
                    .label();
                if !tags.iter().any(|x| x == tag) {
                    tags.push(tag.to_string());
                }
                if tags_only {
                    csv.row_tagged(&[*t], &[tag]);
                } else {
                    csv.row_tagged(
                        &[
                            *t,
                            c.a,
                            c.b,
                            c.p_sq,
                            c.d,
                            cyl_hamiltonian(j1, j2, c),
                            integral_f(j1, j2, c),
                        ],
                        &[tag],
                    );
                }
            }
            let rep = TrajectoryReport {
                index,
                csv: file,
                energy_drift: traj.max_energy_drift,
                momentum_drift: None,
                f_drift: Some(traj.max_f_drift),
                max_constraint_residual: None,
                stratum_tags: tags,
            };
            Ok((csv.into_bytes(), rep))
        }
    }
}

fn simulate(cfg: &ExperimentConfig, tags_only: bool) -> CliResult<RunOutcome> {
    if tags_only && !matches!(cfg.mode, Mode::Axi | Mode::Cyl) {
        return Err(CliError::Usage(format!(
            "strata classification needs mode axi or cyl, config has {:?}",
            cfg.mode.name()
        )));
    }
    let j = cfg.mass_tensor()?;
    let starts = resolve_starts(cfg, &j)?;
    let mut report = RunReport::new(cfg.mode.name(), cfg.dimension, &cfg.mass);

    let results: Vec<(Vec<u8>, TrajectoryReport)> = if starts.len() == 1 {
        vec![run_one(cfg, &j, 0, starts.into_iter().next().unwrap(), tags_only)?]
    } else {
        // one worker per trajectory; workers share only the immutable
        // config and mass tensor, results come back over a channel
        let shared = Arc::new((cfg.clone(), j.clone()));
        let (tx, rx) = mpsc::channel();
        let handles: Vec<_> = starts
            .into_iter()
            .enumerate()
            .map(|(i, st)| {
                let tx = tx.clone();
                let shared = Arc::clone(&shared);
                std::thread::spawn(move || {
                    let (cfg, j) = &*shared;
                    let out = run_one(cfg, j, i, st, tags_only);
                    let _ = tx.send((i, out));
                })
            })
            .collect();
        drop(tx);
        let mut slots: Vec<Option<CliResult<(Vec<u8>, TrajectoryReport)>>> = Vec::new();
        for (i, out) in rx {
            if slots.len() <= i {
                slots.resize_with(i + 1, || None);
            }
            slots[i] = Some(out);
        }
        for h in handles {
            let _ = h.join();
        }
        let mut results = Vec::with_capacity(slots.len());
        for (i, slot) in slots.into_iter().enumerate() {
            let out = slot.ok_or_else(|| {
                CliError::Numeric(format!("worker {i} panicked before reporting"))
            })?;
            results.push(out?);
        }
        results
    };

    for (bytes, rep) in results {
        std::fs::write(cfg.out_dir.join(&rep.csv), bytes)?;
        for tag in &rep.stratum_tags {
            report.note_stratum(tag);
        }
        report.trajectories.push(rep);
    }
    Ok(RunOutcome {
        report,
        failure: None,
    })
}

// ---------------------------------------------------------------------------
// Energy-momentum map emission
// ---------------------------------------------------------------------------

fn em_map_mode(cfg: &ExperimentConfig) -> CliResult<RunOutcome> {
    let j = cfg.mass_tensor()?;
    let n = cfg.dimension;
    let mut report = RunReport::new(cfg.mode.name(), n, &cfg.mass);

    // the critical-ray slope file: P = coefficient · H per principal plane
    let mut rays = String::from("i,j,coefficient\n");
    for i in 0..n {
        for k in i + 1..n {
            let coeff = 2.0 * j.plane_moment(i, k);
            rays.push_str(&format!("{i},{k},{}\n", crate::emit::fmt_f64(coeff)));
            report.em_rays.push(RayReport {
                plane: (i, k),
                coefficient: coeff,
            });
        }
    }
    std::fs::write(cfg.out_dir.join("rays.csv"), rays)?;

    // sampled (P, H) values with the wedge-membership flag
    let seed = cfg.initial.seed().unwrap_or(0);
    let mut rng = seeded_rng(seed);
    let mut csv = String::from("P,H,in_wedge\n");
    let mut violations = 0usize;
    for _ in 0..cfg.em_samples {
        let s = ReducedState::random(n, 1.5, &mut rng);
        let em = em_map(&j, &s);
        let inside = em.in_wedge(&j, 1e-9);
        if !inside {
            violations += 1;
        }
        csv.push_str(&format!(
            "{},{},{}\n",
            crate::emit::fmt_f64(em.p_sq),
            crate::emit::fmt_f64(em.h),
            u8::from(inside)
        ));
    }
    std::fs::write(cfg.out_dir.join("em_samples.csv"), csv)?;
    report.checks.push(CheckReport::new(
        "em-samples-outside-wedge",
        violations as f64,
        0.0,
    ));

    // every principal plane's steady rotation lands on its ray
    for i in 0..n {
        for k in i + 1..n {
            let plane = plane_of(&j, (i, k));
            let full = steady_rotation_state(&j, &plane, 1.0)?;
            let em = em_map(&j, &project_to_reduced(&j, &full)?);
            let residual =
                (em.p_sq - 2.0 * plane.moment * em.h).abs() / em.p_sq.max(1.0);
            report.checks.push(CheckReport::new(
                &format!("em-ray-residual-{i}-{k}"),
                residual,
                1e-12,
            ));
        }
    }

    let failure = report
        .checks
        .iter()
        .find(|c| !c.pass)
        .map(|c| CliError::Invariant(format!("em-map check failed: {}", c.name)));
    Ok(RunOutcome { report, failure })
}

// ---------------------------------------------------------------------------
// Spectrum presets
// ---------------------------------------------------------------------------

fn spectrum_mode(cfg: &ExperimentConfig) -> CliResult<RunOutcome> {
    let preset: SpectrumPreset = cfg
        .spectrum_preset
        .expect("validation guarantees a preset in spectrum mode");
    let spec = preset.analyze()?;
    let mut csv = String::from("frequency,amplitude\n");
    for (f, a) in &spec.frequencies {
        csv.push_str(&format!(
            "{},{}\n",
            crate::emit::fmt_f64(*f),
            crate::emit::fmt_f64(*a)
        ));
    }
    std::fs::write(cfg.out_dir.join("spectrum.csv"), csv)?;

    let mut report = RunReport::new(cfg.mode.name(), cfg.dimension, &cfg.mass);
    report.spectrum = Some(SpectrumReport {
        preset: preset.name().to_string(),
        expected_base_count: preset.expected_base_count(),
        base_count: spec.base_count,
        base: spec.base.clone(),
        tolerance: spec.tolerance,
        near_resonance: spec.near_resonance,
        peaks: spec.frequencies.len(),
    });
    let failure = (spec.base_count != preset.expected_base_count()).then(|| {
        CliError::Invariant(format!(
            "preset {} expected base count {}, measured {}",
            preset.name(),
            preset.expected_base_count(),
            spec.base_count
        ))
    });
    Ok(RunOutcome { report, failure })
}

// ---------------------------------------------------------------------------
// Axis trace
// ---------------------------------------------------------------------------

fn axis_trace_mode(cfg: &ExperimentConfig) -> CliResult<RunOutcome> {
    let j = cfg.mass_tensor()?;
    let starts = resolve_starts(cfg, &j)?;
    let mut report = RunReport::new(cfg.mode.name(), cfg.dimension, &cfg.mass);
    let opts = integrator_options(cfg);

    for (index, start) in starts.into_iter().enumerate() {
        let s0 = match start {
            Start::Reduced(s) => s,
            _ => unreachable!("axis-trace resolves reduced starts only"),
        };
        let h = hamiltonian_reduced(&j, &s0);
        let p_sq = s0.p().norm_sq();
        let traj = integrate_reduced(&j, &s0, &opts)?;
        let trace = axis_trace_from_reduced(&traj.states)?;

        let mut csv = Csv::new(&["t", "x1", "x2", "x3"].map(String::from));
        for (t, x) in traj.times.iter().zip(trace.samples()) {
            csv.row(&[*t, x[0], x[1], x[2]]);
        }
        let file = format!("axis_trace_{index:03}.csv");
        std::fs::write(cfg.out_dir.join(&file), csv.into_bytes())?;

        // for an axisymmetric body the trace sweeps an invariant cylinder
        if let Some((j1, j2)) = cfg.axi_split {
            let worst = trace
                .samples()
                .iter()
                .map(|x: &Vector<f64>| axis_cylinder_residual(j1, j2, h, p_sq, x).abs())
                .fold(0.0f64, f64::max);
            report.checks.push(CheckReport::new(
                &format!("axis-cylinder-residual-{index:03}"),
                worst,
                1e-8,
            ));
        }
        report.trajectories.push(TrajectoryReport {
            index,
            csv: file,
            energy_drift: traj.max_energy_drift,
            momentum_drift: Some(traj.max_momentum_drift),
            f_drift: None,
            max_constraint_residual: None,
            stratum_tags: Vec::new(),
        });
    }

    let failure = report
        .checks
        .iter()
        .find(|c| !c.pass)
        .map(|c| CliError::Invariant(format!("axis-trace check failed: {}", c.name)));
    Ok(RunOutcome { report, failure })
}
