//! The experiment configuration: documented TOML schema, validation that
//! reports every violated field at once, and the resolved typed form the
//! runners consume.
//!
//! # Schema
//!
//! ```toml
//! mode = "reduced"        # full | reduced | axi | cyl | verify | em-map
//!                         # | spectrum | axis-trace
//! dimension = 3           # n ≥ 3 (unused for spectrum presets)
//! mass = [1.0, 2.0, 3.0]  # positive moments, one per dimension
//!
//! [initial]               # required for trajectory modes
//! kind = "random"         # explicit | random | steady-rotation | cyl-releq
//! seed = 7                # random: RNG seed (VESELOVA_SEED overrides)
//! count = 2               # random: batch size, one worker per trajectory
//! # explicit fields by mode:
//! #   full:    g  = [...]  (row-major n² attitude entries)
//! #            omega = [...] (upper triangle (0,1), (0,2), …, (1,2), …)
//! #   reduced / axis-trace: q = [...], p = [...]
//! #   axi:     q1 = 0.3, p1 = 0.4, p_sq = 2.0
//! #   cyl:     a = 0.55, b = 2.4, p_sq = 6.0, d = 0.05
//! # steady-rotation (full, reduced, axis-trace):
//! #   plane = [0, 1], speed = 2.0
//! # cyl-releq (full, reduced, cyl):
//! #   h = 1.0, p_sq = 6.0
//!
//! [integrator]
//! dt = 1e-3               # default 1e-3
//! steps = 100000          # default 100000
//! energy_guard = 1e-6     # abort when relative energy drift exceeds this
//!
//! [outputs]
//! dir = "out"             # default "out"
//! stride = 100            # sample every stride-th step, default 1
//!
//! [spectrum]              # spectrum mode only
//! preset = "releq-attitude"
//!
//! [em_map]                # em-map mode only
//! samples = 1000          # random states sampled onto the (P, H) plane
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Deserialize;

use veselova::axisymmetric::{axi_moments, AxiPoint};
use veselova::body::{default_eigen_tol, MassTensor};
use veselova::cylindrical::{cyl_equilibrium, CylPoint};
use veselova::full::FullState;
use veselova::linalg::{OrthogonalMatrix, SquareMatrix};
use veselova::presets::SpectrumPreset;
use veselova::reconstruct::CylReleq;
use veselova::reduced::ReducedState;
use veselova::skew::SkewMatrix;

use crate::{CliError, CliResult};

/// What the run computes; written as `mode = "..."` in the config.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Full,
    Reduced,
    Axi,
    Cyl,
    Verify,
    EmMap,
    Spectrum,
    AxisTrace,
}

pub const MODE_NAMES: &str = "full|reduced|axi|cyl|verify|em-map|spectrum|axis-trace";

impl Mode {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "full" => Mode::Full,
            "reduced" => Mode::Reduced,
            "axi" => Mode::Axi,
            "cyl" => Mode::Cyl,
            "verify" => Mode::Verify,
            "em-map" => Mode::EmMap,
            "spectrum" => Mode::Spectrum,
            "axis-trace" => Mode::AxisTrace,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Reduced => "reduced",
            Mode::Axi => "axi",
            Mode::Cyl => "cyl",
            Mode::Verify => "verify",
            Mode::EmMap => "em-map",
            Mode::Spectrum => "spectrum",
            Mode::AxisTrace => "axis-trace",
        }
    }

    fn needs_initial(self) -> bool {
        matches!(
            self,
            Mode::Full | Mode::Reduced | Mode::Axi | Mode::Cyl | Mode::AxisTrace
        )
    }
}

/// Resolved initial-condition specification.
#[derive(Clone, Debug)]
pub enum Initial {
    ExplicitFull { g: Vec<f64>, omega: Vec<f64> },
    ExplicitReduced { q: Vec<f64>, p: Vec<f64> },
    ExplicitAxi { q1: f64, p1: f64, p_sq: f64 },
    ExplicitCyl { a: f64, b: f64, p_sq: f64, d: f64 },
    Random { seed: u64, count: usize },
    SteadyRotation { plane: (usize, usize), speed: f64 },
    CylReleq { h: f64, p_sq: f64 },
}

impl Initial {
    /// Number of trajectories this specification spawns.
    pub fn count(&self) -> usize {
        match self {
            Initial::Random { count, .. } => *count,
            _ => 1,
        }
    }

    /// The RNG seed in play, if any.
    pub fn seed(&self) -> Option<u64> {
        match self {
            Initial::Random { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}

/// Fully validated experiment description.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub dimension: usize,
    pub mass: Vec<f64>,
    pub initial: Initial,
    pub dt: f64,
    pub steps: usize,
    pub energy_guard: f64,
    pub out_dir: PathBuf,
    pub stride: usize,
    /// Spectrum mode: the preset to analyze.
    pub spectrum_preset: Option<SpectrumPreset>,
    /// Em-map mode: number of random states sampled onto the (P, H) plane.
    pub em_samples: usize,
    /// `(J1, J2)` when the mass is axisymmetric about the first axis.
    pub axi_split: Option<(f64, f64)>,
    /// `(J1, J2, r)` when the mass is the contiguous cylindrical diagonal
    /// `[J1 × r, J2 × (n−r)]` with two distinct moments.
    pub cyl_split: Option<(f64, f64, usize)>,
}

impl ExperimentConfig {
    /// Environment-variable seed override (`VESELOVA_SEED`); only random
    /// initial conditions carry a seed, other kinds are unaffected.
    pub fn override_seed(&mut self, seed: u64) {
        if let Initial::Random { seed: s, .. } = &mut self.initial {
            *s = seed;
        }
    }

    pub fn mass_tensor(&self) -> CliResult<MassTensor<f64>> {
        Ok(MassTensor::from_f64s(&self.mass)?)
    }
}

// ---------------------------------------------------------------------------
// Raw schema
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<String>,
    dimension: Option<usize>,
    mass: Option<Vec<f64>>,
    initial: Option<RawInitial>,
    integrator: Option<RawIntegrator>,
    outputs: Option<RawOutputs>,
    spectrum: Option<RawSpectrum>,
    em_map: Option<RawEmMap>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    kind: Option<String>,
    seed: Option<u64>,
    count: Option<usize>,
    q: Option<Vec<f64>>,
    p: Option<Vec<f64>>,
    g: Option<Vec<f64>>,
    omega: Option<Vec<f64>>,
    q1: Option<f64>,
    p1: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    d: Option<f64>,
    p_sq: Option<f64>,
    plane: Option<Vec<usize>>,
    speed: Option<f64>,
    h: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    dt: Option<f64>,
    steps: Option<usize>,
    energy_guard: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutputs {
    dir: Option<String>,
    stride: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectrum {
    preset: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEmMap {
    samples: Option<usize>,
}

// ---------------------------------------------------------------------------
// Parsing and validation
// ---------------------------------------------------------------------------

/// Parses and validates a configuration. Syntax errors carry the TOML
/// line/column; semantic errors list **every** violated field.
pub fn parse_config(text: &str) -> CliResult<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text)
        .map_err(|e| CliError::Usage(format!("config parse error: {e}")))?;
    validate(raw).map_err(|violations| {
        let mut msg = String::from("invalid configuration:");
        for v in &violations {
            let _ = write!(msg, "\n  - {v}");
        }
        CliError::Usage(msg)
    })
}

pub fn load_config(path: &std::path::Path) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Usage(format!("cannot read config {}: {e}", path.display()))
    })?;
    parse_config(&text)
}

fn validate(raw: RawConfig) -> Result<ExperimentConfig, Vec<String>> {
    let mut v: Vec<String> = Vec::new();

    let mode = match raw.mode.as_deref() {
        None => {
            v.push(format!("mode: required, one of {MODE_NAMES}"));
            None
        }
        Some(s) => match Mode::parse(s) {
            Some(m) => Some(m),
            None => {
                v.push(format!("mode: unknown mode {s:?}, expected one of {MODE_NAMES}"));
                None
            }
        },
    };

    // --- spectrum preset (resolves dimension/mass when absent) ------------
    let mut preset: Option<SpectrumPreset> = None;
    match (&raw.spectrum, mode) {
        (Some(_), Some(m)) if m != Mode::Spectrum => {
            v.push("spectrum: table is only valid in spectrum mode".into());
        }
        (Some(sp), _) => match sp.preset.as_deref() {
            None => v.push("spectrum.preset: required in spectrum mode".into()),
            Some(name) => match SpectrumPreset::parse(name) {
                Some(p) => preset = Some(p),
                None => {
                    let names: Vec<&str> =
                        SpectrumPreset::ALL.iter().map(|p| p.name()).collect();
                    v.push(format!(
                        "spectrum.preset: unknown preset {name:?}, expected one of {}",
                        names.join(", ")
                    ));
                }
            },
        },
        (None, Some(Mode::Spectrum)) => {
            v.push("spectrum.preset: required in spectrum mode".into());
        }
        (None, _) => {}
    }

    // --- dimension and mass ------------------------------------------------
    let preset_dims = preset.and_then(|p| preset_dimension_mass(p).ok());
    let dimension = match (raw.dimension, mode) {
        (Some(n), _) => {
            if n < 3 {
                v.push(format!("dimension: must be at least 3, got {n}"));
                None
            } else {
                Some(n)
            }
        }
        (None, Some(Mode::Spectrum)) => preset_dims.as_ref().map(|(n, _)| *n),
        (None, _) => {
            v.push("dimension: required (n ≥ 3)".into());
            None
        }
    };
    let mass = match (raw.mass, mode) {
        (Some(m), _) => {
            let mut ok = true;
            if let Some(n) = dimension {
                if m.len() != n {
                    v.push(format!(
                        "mass: expected {n} entries to match dimension, got {}",
                        m.len()
                    ));
                    ok = false;
                }
            }
            if m.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
                v.push("mass: mass tensor must be positive".into());
                ok = false;
            }
            if ok {
                Some(m)
            } else {
                None
            }
        }
        (None, Some(Mode::Spectrum)) => preset_dims.map(|(_, m)| m),
        (None, _) => {
            v.push("mass: required (positive moments, one per dimension)".into());
            None
        }
    };

    // --- integrator ----------------------------------------------------------
    let integ = raw.integrator.unwrap_or_default();
    let dt = integ.dt.unwrap_or(1e-3);
    if !(dt > 0.0) || !dt.is_finite() {
        v.push(format!("integrator.dt: must be positive and finite, got {dt}"));
    }
    let steps = integ.steps.unwrap_or(100_000);
    if steps == 0 {
        v.push("integrator.steps: must be at least 1".into());
    }
    let energy_guard = integ.energy_guard.unwrap_or(1e-6);
    if !(energy_guard > 0.0) || !energy_guard.is_finite() {
        v.push(format!(
            "integrator.energy_guard: must be positive and finite, got {energy_guard}"
        ));
    }

    // --- outputs -------------------------------------------------------------
    let outs = raw.outputs.unwrap_or_default();
    let out_dir = PathBuf::from(outs.dir.unwrap_or_else(|| "out".into()));
    let stride = outs.stride.unwrap_or(1);
    if stride == 0 {
        v.push("outputs.stride: must be at least 1".into());
    }

    // --- em-map --------------------------------------------------------------
    let mut em_samples = 1000usize;
    match (&raw.em_map, mode) {
        (Some(_), Some(m)) if m != Mode::EmMap => {
            v.push("em_map: table is only valid in em-map mode".into());
        }
        (Some(em), _) => {
            let s = em.samples.unwrap_or(1000);
            if s == 0 {
                v.push("em_map.samples: must be at least 1".into());
            } else {
                em_samples = s;
            }
        }
        (None, _) => {}
    }

    // --- mode-specific mass structure -----------------------------------------
    let tensor = mass
        .as_ref()
        .and_then(|m| MassTensor::<f64>::from_f64s(m).ok());
    let mut axi_split = None;
    let mut cyl_split = None;
    if let Some(j) = &tensor {
        axi_split = axi_moments(j, 0, default_eigen_tol::<f64>()).ok();
        cyl_split = cylindrical_split(j);
        match mode {
            Some(Mode::Axi) if axi_split.is_none() => {
                v.push(
                    "mass: axi mode needs an axisymmetric body J = [J1, J2, …, J2] \
                     (the first moment distinct, the rest equal)"
                        .into(),
                );
            }
            Some(Mode::Cyl) if cyl_split.is_none() => {
                if j.eigen_groups(default_eigen_tol::<f64>()).len() < 2 {
                    v.push(
                        "mass: cylindrical mode needs two distinct moments J1 ≠ J2 \
                         (degenerate body)"
                            .into(),
                    );
                } else {
                    v.push(
                        "mass: cyl mode needs the contiguous cylindrical diagonal \
                         J = [J1 × r, J2 × (n−r)] with r ≥ 2 and n−r ≥ 2"
                            .into(),
                    );
                }
            }
            _ => {}
        }
    }
    if mode == Some(Mode::AxisTrace) {
        if let Some(n) = dimension {
            if n != 3 {
                v.push(format!("dimension: axis-trace needs dimension 3, got {n}"));
            }
        }
    }

    // --- initial condition -----------------------------------------------------
    let initial = validate_initial(mode, dimension, cyl_split, raw.initial, &mut v);

    if !v.is_empty() {
        return Err(v);
    }
    Ok(ExperimentConfig {
        mode: mode.unwrap(),
        dimension: dimension.unwrap(),
        mass: mass.unwrap(),
        initial: initial.unwrap(),
        dt,
        steps,
        energy_guard,
        out_dir,
        stride,
        spectrum_preset: preset,
        em_samples,
        axi_split,
        cyl_split,
    })
}

/// Checks kind-specific field presence and value admissibility; returns the
/// resolved initial spec when everything needed is present and valid.
fn validate_initial(
    mode: Option<Mode>,
    dimension: Option<usize>,
    cyl_split: Option<(f64, f64, usize)>,
    raw: Option<RawInitial>,
    v: &mut Vec<String>,
) -> Option<Initial> {
    let needs = mode.map(Mode::needs_initial).unwrap_or(false);
    let raw = match raw {
        Some(r) => r,
        None => {
            if needs {
                v.push(format!(
                    "initial: required in {} mode (kind = explicit|random|steady-rotation|cyl-releq)",
                    mode.unwrap().name()
                ));
                return None;
            }
            // verify / em-map default to a seeded random draw
            return Some(Initial::Random { seed: 0, count: 1 });
        }
    };
    if mode == Some(Mode::Spectrum) {
        v.push("initial: not used in spectrum mode (presets are self-contained)".into());
        return None;
    }

    let kind = match raw.kind.as_deref() {
        None => {
            v.push("initial.kind: required (explicit|random|steady-rotation|cyl-releq)".into());
            return None;
        }
        Some(k) => k.to_owned(),
    };

    // Reject stray fields so typos surface instead of being ignored.
    let allowed: &[&str] = match kind.as_str() {
        "explicit" => match mode {
            Some(Mode::Full) => &["g", "omega"],
            Some(Mode::Axi) => &["q1", "p1", "p_sq"],
            Some(Mode::Cyl) => &["a", "b", "p_sq", "d"],
            _ => &["q", "p"],
        },
        "random" => &["seed", "count"],
        "steady-rotation" => &["plane", "speed"],
        "cyl-releq" => &["h", "p_sq"],
        other => {
            v.push(format!(
                "initial.kind: unknown kind {other:?}, expected explicit|random|steady-rotation|cyl-releq"
            ));
            return None;
        }
    };
    let present: &[(&str, bool)] = &[
        ("seed", raw.seed.is_some()),
        ("count", raw.count.is_some()),
        ("q", raw.q.is_some()),
        ("p", raw.p.is_some()),
        ("g", raw.g.is_some()),
        ("omega", raw.omega.is_some()),
        ("q1", raw.q1.is_some()),
        ("p1", raw.p1.is_some()),
        ("a", raw.a.is_some()),
        ("b", raw.b.is_some()),
        ("d", raw.d.is_some()),
        ("p_sq", raw.p_sq.is_some()),
        ("plane", raw.plane.is_some()),
        ("speed", raw.speed.is_some()),
        ("h", raw.h.is_some()),
    ];
    for (name, set) in present {
        if *set && !allowed.contains(name) {
            v.push(format!(
                "initial.{name}: not a field of kind = {kind:?} (allowed: {})",
                allowed.join(", ")
            ));
        }
    }

    match kind.as_str() {
        "random" => {
            let count = raw.count.unwrap_or(1);
            if count == 0 {
                v.push("initial.count: must be at least 1".into());
                return None;
            }
            if matches!(mode, Some(Mode::Verify) | Some(Mode::EmMap)) && raw.count.is_some() {
                v.push(format!(
                    "initial.count: not used in {} mode",
                    mode.unwrap().name()
                ));
            }
            Some(Initial::Random {
                seed: raw.seed.unwrap_or(0),
                count,
            })
        }
        "explicit" => validate_explicit(mode, dimension, &raw, v),
        "steady-rotation" => {
            if !matches!(
                mode,
                Some(Mode::Full) | Some(Mode::Reduced) | Some(Mode::AxisTrace) | None
            ) {
                v.push(format!(
                    "initial.kind: steady-rotation is only valid in full, reduced, or axis-trace mode, not {}",
                    mode.map(Mode::name).unwrap_or("?")
                ));
                return None;
            }
            let plane = match raw.plane {
                None => {
                    v.push("initial.plane: required for steady-rotation (two axis indices)".into());
                    None
                }
                Some(p) if p.len() != 2 => {
                    v.push(format!(
                        "initial.plane: expected two axis indices, got {}",
                        p.len()
                    ));
                    None
                }
                Some(p) => {
                    let (i, k) = (p[0], p[1]);
                    let n = dimension.unwrap_or(usize::MAX);
                    if i == k || i >= n || k >= n {
                        v.push(format!(
                            "initial.plane: indices must be distinct and < dimension, got [{i}, {k}]"
                        ));
                        None
                    } else {
                        Some((i, k))
                    }
                }
            };
            let speed = match raw.speed {
                None => {
                    v.push("initial.speed: required for steady-rotation".into());
                    None
                }
                Some(s) if s == 0.0 || !s.is_finite() => {
                    v.push(format!("initial.speed: must be nonzero and finite, got {s}"));
                    None
                }
                Some(s) => Some(s),
            };
            match (plane, speed) {
                (Some(plane), Some(speed)) => Some(Initial::SteadyRotation { plane, speed }),
                _ => None,
            }
        }
        "cyl-releq" => {
            if !matches!(
                mode,
                Some(Mode::Full) | Some(Mode::Reduced) | Some(Mode::Cyl) | None
            ) {
                v.push(format!(
                    "initial.kind: cyl-releq is only valid in full, reduced, or cyl mode, not {}",
                    mode.map(Mode::name).unwrap_or("?")
                ));
                return None;
            }
            let h = match raw.h {
                None => {
                    v.push("initial.h: required for cyl-releq (energy, > 0)".into());
                    None
                }
                Some(x) if !(x > 0.0) || !x.is_finite() => {
                    v.push(format!("initial.h: must be positive and finite, got {x}"));
                    None
                }
                Some(x) => Some(x),
            };
            let p_sq = match raw.p_sq {
                None => {
                    v.push("initial.p_sq: required for cyl-releq (momentum level, > 0)".into());
                    None
                }
                Some(x) if !(x > 0.0) || !x.is_finite() => {
                    v.push(format!("initial.p_sq: must be positive and finite, got {x}"));
                    None
                }
                Some(x) => Some(x),
            };
            let (h, p_sq) = match (h, p_sq) {
                (Some(h), Some(p)) => (h, p),
                _ => return None,
            };
            match mode {
                Some(Mode::Full) | Some(Mode::Reduced) => {
                    // The explicit relative equilibrium lives in dimension 4
                    // with the cylindrical split [J1, J1, J2, J2].
                    match cyl_split {
                        Some((j1, j2, 2)) if dimension == Some(4) => {
                            if let Err(e) = CylReleq::try_new(j1, j2, h, p_sq) {
                                v.push(format!("initial: relative equilibrium rejected: {e}"));
                                return None;
                            }
                        }
                        _ => {
                            v.push(
                                "initial.kind: cyl-releq in full/reduced mode needs dimension 4 \
                                 and mass [J1, J1, J2, J2] with J1 ≠ J2"
                                    .into(),
                            );
                            return None;
                        }
                    }
                }
                Some(Mode::Cyl) => {
                    if let Some((j1, j2, _)) = cyl_split {
                        match cyl_equilibrium(j1, j2, h, p_sq) {
                            Ok(Some(_)) => {}
                            Ok(None) => {
                                v.push(format!(
                                    "initial: no relative equilibrium at (h = {h}, P = {p_sq}) for this body"
                                ));
                                return None;
                            }
                            Err(e) => {
                                v.push(format!("initial: relative equilibrium rejected: {e}"));
                                return None;
                            }
                        }
                    }
                }
                _ => {}
            }
            Some(Initial::CylReleq { h, p_sq })
        }
        _ => unreachable!("kind validated above"),
    }
}

fn validate_explicit(
    mode: Option<Mode>,
    dimension: Option<usize>,
    raw: &RawInitial,
    v: &mut Vec<String>,
) -> Option<Initial> {
    let n = dimension?;
    match mode {
        Some(Mode::Full) => {
            let g = match &raw.g {
                None => {
                    v.push("initial.g: required for explicit full states (row-major n² entries)".into());
                    None
                }
                Some(g) if g.len() != n * n => {
                    v.push(format!(
                        "initial.g: expected {} row-major entries, got {}",
                        n * n,
                        g.len()
                    ));
                    None
                }
                Some(g) => Some(g.clone()),
            };
            let upper_len = n * (n - 1) / 2;
            let omega = match &raw.omega {
                None => {
                    v.push(
                        "initial.omega: required for explicit full states (upper triangle entries)"
                            .into(),
                    );
                    None
                }
                Some(o) if o.len() != upper_len => {
                    v.push(format!(
                        "initial.omega: expected {upper_len} upper-triangle entries, got {}",
                        o.len()
                    ));
                    None
                }
                Some(o) => Some(o.clone()),
            };
            let (g, omega) = match (g, omega) {
                (Some(g), Some(o)) => (g, o),
                _ => return None,
            };
            // the state must actually be admissible: orthogonal attitude,
            // velocity of the constrained single-plane form
            match build_full_state(n, &g, &omega) {
                Ok(_) => Some(Initial::ExplicitFull { g, omega }),
                Err(e) => {
                    v.push(format!("initial: explicit full state rejected: {e}"));
                    None
                }
            }
        }
        Some(Mode::Axi) => {
            let (q1, p1, p_sq) = match (raw.q1, raw.p1, raw.p_sq) {
                (Some(a), Some(b), Some(c)) => (a, b, c),
                (q1, p1, p_sq) => {
                    for (name, val) in [("q1", q1), ("p1", p1), ("p_sq", p_sq)] {
                        if val.is_none() {
                            v.push(format!("initial.{name}: required for explicit axi points"));
                        }
                    }
                    return None;
                }
            };
            match AxiPoint::try_new(q1, p1, p_sq, veselova::axisymmetric::stratum_tol::<f64>()) {
                Ok(_) => Some(Initial::ExplicitAxi { q1, p1, p_sq }),
                Err(e) => {
                    v.push(format!("initial: point outside the canoe: {e}"));
                    None
                }
            }
        }
        Some(Mode::Cyl) => {
            let (a, b, p_sq, d) = match (raw.a, raw.b, raw.p_sq, raw.d) {
                (Some(a), Some(b), Some(p), Some(d)) => (a, b, p, d),
                (a, b, p_sq, d) => {
                    for (name, missing) in [
                        ("a", a.is_none()),
                        ("b", b.is_none()),
                        ("p_sq", p_sq.is_none()),
                        ("d", d.is_none()),
                    ] {
                        if missing {
                            v.push(format!("initial.{name}: required for explicit cyl points"));
                        }
                    }
                    return None;
                }
            };
            match CylPoint::try_new(a, b, p_sq, d, veselova::cylindrical::stratum_tol::<f64>()) {
                Ok(_) => Some(Initial::ExplicitCyl { a, b, p_sq, d }),
                Err(e) => {
                    v.push(format!("initial: point outside the cone: {e}"));
                    None
                }
            }
        }
        Some(Mode::Reduced) | Some(Mode::AxisTrace) => {
            let q = match &raw.q {
                None => {
                    v.push("initial.q: required for explicit reduced states".into());
                    None
                }
                Some(q) if q.len() != n => {
                    v.push(format!("initial.q: expected {n} entries, got {}", q.len()));
                    None
                }
                Some(q) => Some(q.clone()),
            };
            let p = match &raw.p {
                None => {
                    v.push("initial.p: required for explicit reduced states".into());
                    None
                }
                Some(p) if p.len() != n => {
                    v.push(format!("initial.p: expected {n} entries, got {}", p.len()));
                    None
                }
                Some(p) => Some(p.clone()),
            };
            let (q, p) = match (q, p) {
                (Some(q), Some(p)) => (q, p),
                _ => return None,
            };
            // explicit reduced states are projected onto the bundle
            // (q normalized, p stripped of its q component)
            match ReducedState::<f64>::project_f64s(&q, &p) {
                Ok(_) => Some(Initial::ExplicitReduced { q, p }),
                Err(e) => {
                    v.push(format!("initial: explicit reduced state rejected: {e}"));
                    None
                }
            }
        }
        _ => {
            v.push(format!(
                "initial.kind: explicit is only valid in trajectory modes, not {}",
                mode.map(Mode::name).unwrap_or("?")
            ));
            None
        }
    }
}

/// Builds the full state described by row-major attitude entries and
/// upper-triangle velocity entries, verifying admissibility.
pub fn build_full_state(n: usize, g: &[f64], omega: &[f64]) -> veselova::Result<FullState<f64>> {
    let m = SquareMatrix::from_f64s(n, g);
    let att = OrthogonalMatrix::try_new(m, 1e-8)?;
    let om = SkewMatrix::from_upper(n, omega.to_vec())?;
    FullState::try_new(att, om)
}

/// `(J1, J2, r)` when the diagonal is exactly `[J1 × r, J2 × (n−r)]` with
/// two distinct moments and both blocks of size ≥ 2.
fn cylindrical_split(j: &MassTensor<f64>) -> Option<(f64, f64, usize)> {
    let groups = j.eigen_groups(default_eigen_tol::<f64>());
    if groups.len() != 2 {
        return None;
    }
    let n = j.dim();
    let (first, second) = if groups[0][0] == 0 {
        (&groups[0], &groups[1])
    } else {
        (&groups[1], &groups[0])
    };
    let r = first.len();
    if r < 2 || n - r < 2 {
        return None;
    }
    let contiguous = first.iter().copied().eq(0..r) && second.iter().copied().eq(r..n);
    if !contiguous {
        return None;
    }
    Some((j.moment(0), j.moment(r), r))
}

fn preset_dimension_mass(p: SpectrumPreset) -> veselova::Result<(usize, Vec<f64>)> {
    use veselova::presets::{axi_preset_start, cyl_preset_start};
    let j = match p {
        SpectrumPreset::AxiReduced | SpectrumPreset::AxiAttitude => axi_preset_start()?.0,
        SpectrumPreset::CylReduced | SpectrumPreset::CylAttitude => cyl_preset_start()?.0,
        SpectrumPreset::ReleqAttitude => {
            CylReleq::try_new(1.0, 2.0, 1.0, 6.0)?.mass().clone()
        }
    };
    Ok((j.dim(), j.diag().to_vec()))
}
