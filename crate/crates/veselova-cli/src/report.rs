//! The versioned JSON run report: conserved-quantity drifts, constraint
//! residuals, stratum tags, spectrum summaries, and wall time.

use std::path::Path;

use serde::Serialize;

use crate::CliResult;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub mode: String,
    pub dimension: usize,
    pub mass: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trajectories: Vec<TrajectoryReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckReport>,
    /// Stratum tags encountered anywhere in the run, in first-seen order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub stratum_tags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub em_rays: Vec<RayReport>,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn new(mode: &str, dimension: usize, mass: &[f64]) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            mode: mode.to_string(),
            dimension,
            mass: mass.to_vec(),
            trajectories: Vec::new(),
            checks: Vec::new(),
            stratum_tags: Vec::new(),
            spectrum: None,
            em_rays: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn note_stratum(&mut self, tag: &str) {
        if !self.stratum_tags.iter().any(|t| t == tag) {
            self.stratum_tags.push(tag.to_string());
        }
    }

    /// Every reported drift and residual must be a finite number.
    pub fn drifts_finite(&self) -> bool {
        self.trajectories.iter().all(|t| {
            t.energy_drift.is_finite()
                && t.momentum_drift.map_or(true, f64::is_finite)
                && t.f_drift.map_or(true, f64::is_finite)
                && t.max_constraint_residual.map_or(true, f64::is_finite)
        }) && self.checks.iter().all(|c| c.value.is_finite())
    }

    pub fn write_json(&self, path: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| crate::CliError::Usage(format!("report serialization: {e}")))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct TrajectoryReport {
    pub index: usize,
    /// Emitted CSV file name, relative to the output directory.
    pub csv: String,
    /// Max relative energy drift along the trajectory.
    pub energy_drift: f64,
    /// Max relative drift of the momentum level P (absent for cone runs,
    /// where P is exact by construction).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub momentum_drift: Option<f64>,
    /// Max relative drift of the cylindrical integral F (cone runs only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_drift: Option<f64>,
    /// Max constraint residual (full runs only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_constraint_residual: Option<f64>,
    /// Stratum tags encountered along this trajectory, first-seen order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub stratum_tags: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    /// Measured residual/drift (smaller is better).
    pub value: f64,
    /// Pass threshold the value is compared against.
    pub threshold: f64,
    pub pass: bool,
}

impl CheckReport {
    pub fn new(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            threshold,
            pass: value.is_finite() && value <= threshold,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    pub preset: String,
    pub expected_base_count: usize,
    pub base_count: usize,
    pub base: Vec<f64>,
    pub tolerance: f64,
    pub near_resonance: bool,
    pub peaks: usize,
}

#[derive(Debug, Serialize)]
pub struct RayReport {
    pub plane: (usize, usize),
    /// Slope coefficient of the critical ray P = 2(J_i + J_j) H.
    pub coefficient: f64,
}
