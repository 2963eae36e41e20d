//! Shipped demonstration presets with known invariant torus dimensions.
//!
//! Each preset freezes a mass tensor, an initial condition, and a sampling
//! grid; its signal is regenerated on demand by the same integrators the
//! rest of the library uses. The expected base counts are the documented
//! torus dimensions: an axisymmetric 3D trajectory winds a 2-torus both in
//! the reduced space and upstairs, a perturbed cylindrical 4D relative
//! equilibrium winds a 3-torus in the reduced space and a 4-torus
//! upstairs, and the exact relative equilibrium's attitude carries three
//! rationally independent frequencies.

use crate::body::MassTensor;
use crate::error::Result;
use crate::full::{integrate_full, FullState};
use crate::linalg::OrthogonalMatrix;
use crate::reconstruct::{reconstruct_3d, CylReleq};
use crate::reduced::{integrate_reduced, vector_field_raw, IntegratorOptions, ReducedState};
use crate::spectrum::{
    attitude_channels, frequency_analysis, reduced_channels, FrequencySpectrum, SpectrumOptions,
};

/// Total sampled time of every shipped spectrum preset.
pub const PRESET_TOTAL_TIME: f64 = 1600.0;
/// Sample count of every shipped spectrum preset (a power of two).
pub const PRESET_SAMPLES: usize = 32_768;

/// Axisymmetric preset body and start: `J = diag[1, 2, 2]`, a generic
/// admissible point.
pub fn axi_preset_start() -> Result<(MassTensor<f64>, ReducedState<f64>)> {
    let j = MassTensor::from_f64s(&[1.0, 2.0, 2.0])?;
    let s = ReducedState::project_f64s(&[0.6, 0.8, 0.0], &[0.4, -0.3, 1.3])?;
    Ok((j, s))
}

/// Cylindrical preset parameters `(J₁, J₂, h, P)` for the perturbed
/// relative equilibrium. The momentum level is chosen so that no low-order
/// integer combination of the equilibrium frequencies falls near another
/// spectral line at this sampling length.
pub const CYL_PRESET: (f64, f64, f64, f64) = (1.0, 3.5, 1.0, 11.15);

/// Cylindrical preset body and start: the relative equilibrium of
/// [`CYL_PRESET`] with its momentum kicked off the equilibrium circle.
pub fn cyl_preset_start() -> Result<(MassTensor<f64>, ReducedState<f64>)> {
    let (j1, j2, h, p_sq) = CYL_PRESET;
    let j = MassTensor::from_f64s(&[j1, j1, j2, j2])?;
    let a0 = (p_sq - 4.0 * j2 * h) / (4.0 * (j1 - j2) * h);
    let b0 = (p_sq - 4.0 * j2 * h) * (p_sq + 4.0 * j1 * h) / (8.0 * (j1 - j2) * h);
    let q0 = [a0.sqrt(), 0.0, (1.0 - a0).sqrt(), 0.0];
    let p0 = [0.45, -b0.sqrt(), -0.4, -(p_sq - b0).sqrt()];
    let s = ReducedState::project_f64s(&q0, &p0)?;
    Ok((j, s))
}

/// Relative-equilibrium preset parameters `(J₁, J₂, h, P)` for the exact
/// closed-form solution.
pub const RELEQ_PRESET: (f64, f64, f64, f64) = (1.0, 2.0, 1.0, 6.0);

fn preset_options(substeps: usize) -> IntegratorOptions<f64> {
    let dt_sample = PRESET_TOTAL_TIME / PRESET_SAMPLES as f64;
    IntegratorOptions {
        dt: dt_sample / substeps as f64,
        steps: PRESET_SAMPLES * substeps,
        stride: substeps,
        energy_guard: 1e-6,
    }
}

fn sample_reduced_preset(
    j: &MassTensor<f64>,
    s0: &ReducedState<f64>,
    substeps: usize,
) -> Result<Vec<ReducedState<f64>>> {
    let traj = integrate_reduced(j, s0, &preset_options(substeps))?;
    Ok(traj.states[..PRESET_SAMPLES].to_vec())
}

fn sample_cyl_attitude() -> Result<Vec<FullState<f64>>> {
    let (j, s) = cyl_preset_start()?;
    let (j1, j2, h, p_sq) = CYL_PRESET;
    // gauge: the closed-form attitude of the unperturbed equilibrium
    let releq = CylReleq::try_new(j1, j2, h, p_sq)?;
    let g0 = OrthogonalMatrix::new(releq.initial_attitude().clone())?;
    let (qdot, _) = vector_field_raw(&j, s.q(), s.p());
    let s0 = FullState::from_attitude_velocity(g0, &qdot)?;
    let traj = integrate_full(&j, &s0, &preset_options(10))?;
    Ok(traj.states[..PRESET_SAMPLES].to_vec())
}

fn sample_releq_attitude() -> Result<Vec<FullState<f64>>> {
    let (j1, j2, h, p_sq) = RELEQ_PRESET;
    let releq = CylReleq::try_new(j1, j2, h, p_sq)?;
    let dt = PRESET_TOTAL_TIME / PRESET_SAMPLES as f64;
    (0..PRESET_SAMPLES)
        .map(|k| releq.state_at(dt * k as f64))
        .collect()
}

/// The shipped spectrum presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumPreset {
    /// Axisymmetric generic trajectory, reduced signal (q, p): 2-torus.
    AxiReduced,
    /// The same trajectory reconstructed upstairs, attitude signal: 2-torus.
    AxiAttitude,
    /// Perturbed cylindrical relative equilibrium, reduced signal: 3-torus.
    CylReduced,
    /// The same motion integrated upstairs, attitude signal: 4-torus.
    CylAttitude,
    /// Exact relative equilibrium, attitude signal: three frequencies.
    ReleqAttitude,
}

impl SpectrumPreset {
    pub const ALL: [SpectrumPreset; 5] = [
        SpectrumPreset::AxiReduced,
        SpectrumPreset::AxiAttitude,
        SpectrumPreset::CylReduced,
        SpectrumPreset::CylAttitude,
        SpectrumPreset::ReleqAttitude,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpectrumPreset::AxiReduced => "axi-reduced",
            SpectrumPreset::AxiAttitude => "axi-attitude",
            SpectrumPreset::CylReduced => "cyl-reduced",
            SpectrumPreset::CylAttitude => "cyl-attitude",
            SpectrumPreset::ReleqAttitude => "releq-attitude",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn describe(self) -> &'static str {
        match self {
            SpectrumPreset::AxiReduced => {
                "axisymmetric J=[1,2,2], generic start, (q,p) channels"
            }
            SpectrumPreset::AxiAttitude => {
                "axisymmetric J=[1,2,2], generic start, reconstructed attitude channels"
            }
            SpectrumPreset::CylReduced => {
                "cylindrical J=[1,1,3.5,3.5], perturbed relative equilibrium, (q,p) channels"
            }
            SpectrumPreset::CylAttitude => {
                "cylindrical J=[1,1,3.5,3.5], perturbed relative equilibrium, attitude channels"
            }
            SpectrumPreset::ReleqAttitude => {
                "cylindrical J=[1,1,2,2], exact relative equilibrium, attitude channels"
            }
        }
    }

    /// Documented torus dimension of the sampled signal.
    pub fn expected_base_count(self) -> usize {
        match self {
            SpectrumPreset::AxiReduced | SpectrumPreset::AxiAttitude => 2,
            SpectrumPreset::CylReduced | SpectrumPreset::ReleqAttitude => 3,
            SpectrumPreset::CylAttitude => 4,
        }
    }

    /// Sample spacing of the preset signal.
    pub fn dt(self) -> f64 {
        PRESET_TOTAL_TIME / PRESET_SAMPLES as f64
    }

    /// Regenerates the preset's signal channels.
    pub fn channels(self) -> Result<Vec<Vec<f64>>> {
        match self {
            SpectrumPreset::AxiReduced => {
                let (j, s) = axi_preset_start()?;
                Ok(reduced_channels(&sample_reduced_preset(&j, &s, 8)?))
            }
            SpectrumPreset::AxiAttitude => {
                let (j, s) = axi_preset_start()?;
                let states = sample_reduced_preset(&j, &s, 8)?;
                let full = reconstruct_3d(&j, &states, &OrthogonalMatrix::identity(3))?;
                Ok(attitude_channels(&full))
            }
            SpectrumPreset::CylReduced => {
                let (j, s) = cyl_preset_start()?;
                Ok(reduced_channels(&sample_reduced_preset(&j, &s, 8)?))
            }
            SpectrumPreset::CylAttitude => Ok(attitude_channels(&sample_cyl_attitude()?)),
            SpectrumPreset::ReleqAttitude => Ok(attitude_channels(&sample_releq_attitude()?)),
        }
    }

    /// Runs the frozen analysis pipeline on the regenerated signal.
    pub fn analyze(self) -> Result<FrequencySpectrum<f64>> {
        frequency_analysis(&self.channels()?, self.dt(), &SpectrumOptions::default())
    }
}
