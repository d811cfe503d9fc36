//! Ensemble sweeps over dimension and density.
//!
//! Every `(cell, sample)` pipeline (generate, solve, analyze) is independent.
//! Work is spread over the current rayon pool and results are collected in
//! cell-then-sample order, so output never depends on scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{analyze, stats, ScalingError, ScalingReport};
use crate::eigen::{solve, LanczosConfig, Method};
use crate::matcore::{
    generate, generate_diag_dominant, DensityMode, DiagDominantSpec, Distribution, EnsembleSpec,
    RowScale,
};
use crate::seed;

/// A cell is invalid when more than this fraction of its samples failed.
pub const MAX_FAILURE_FRACTION: f64 = 0.10;

/// Width `W` of the uniform `[−W, W]` diagonal in a diagonal-dominant sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalWidth {
    Absolute(f64),
    /// Multiple of the expected off-diagonal row-sum magnitude `N·ρ·E[|x|]`.
    Relative(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub dims: Vec<usize>,
    pub densities: Vec<f64>,
    pub density_mode: DensityMode,
    pub distribution: Distribution,
    #[serde(default)]
    pub row_scale: Vec<RowScale>,
    #[serde(default)]
    pub diagonal_width: Option<DiagonalWidth>,
    pub samples: usize,
    pub global_seed: u64,
    pub method: Method,
    pub lanczos: LanczosConfig,
}

impl SweepSpec {
    /// Dense uniform sweep with default solver settings.
    pub fn uniform(dims: Vec<usize>, samples: usize, global_seed: u64) -> Self {
        Self {
            dims,
            densities: vec![1.0],
            density_mode: DensityMode::Fixed,
            distribution: Distribution::default(),
            row_scale: Vec::new(),
            diagonal_width: None,
            samples,
            global_seed,
            method: Method::Lanczos,
            lanczos: LanczosConfig::default(),
        }
    }

    /// Ensemble recipe of one sample.
    pub fn ensemble(&self, dim: usize, density: f64, index: usize) -> EnsembleSpec {
        EnsembleSpec {
            dim,
            distribution: self.distribution,
            density,
            density_mode: self.density_mode,
            row_scale: self.row_scale.clone(),
            seed: seed::sample_seed(self.global_seed, dim, density, index),
        }
    }

    fn validate(&self) -> Result<(), ScalingError> {
        if self.dims.is_empty() || self.densities.is_empty() {
            return Err(ScalingError::InvalidSweep("no cells to run".into()));
        }
        if self.samples == 0 {
            return Err(ScalingError::InvalidSweep(
                "samples must be at least 1".into(),
            ));
        }
        self.lanczos.validate()?;
        for &dim in &self.dims {
            for &density in &self.densities {
                self.ensemble(dim, density, 0).validate()?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Ok { report: ScalingReport },
    GenerationFailed { reason: String },
    SolverFailed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub dim: usize,
    /// Density requested for the cell.
    pub density: f64,
    /// Density applied after the `InverseN` rule.
    pub effective_density: f64,
    pub distribution: String,
    pub sample: usize,
    pub seed: u64,
    pub outcome: Outcome,
}

impl MatrixRecord {
    pub fn report(&self) -> Option<&ScalingReport> {
        match &self.outcome {
            Outcome::Ok { report } => Some(report),
            _ => None,
        }
    }

    pub fn failed(&self) -> bool {
        self.report().is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub dim: usize,
    pub density: f64,
    pub effective_density: f64,
    pub distribution: String,
    pub sample_count: usize,
    pub failures: usize,
    pub degenerate: usize,
    /// Reports entering the statistics below.
    pub used: usize,
    pub rms_median: Option<f64>,
    pub rms_mean: Option<f64>,
    pub rms_stddev: Option<f64>,
    pub slope_mean: Option<f64>,
    pub intercept_mean: Option<f64>,
    pub valid: bool,
}

impl CellSummary {
    /// Aggregates the records of one cell.
    pub fn from_records(records: &[MatrixRecord]) -> Self {
        let first = &records[0];
        let failures = records.iter().filter(|r| r.failed()).count();
        let reports: Vec<&ScalingReport> = records.iter().filter_map(|r| r.report()).collect();
        let degenerate = reports.iter().filter(|r| r.is_degenerate()).count();
        let used: Vec<&ScalingReport> =
            reports.into_iter().filter(|r| !r.is_degenerate()).collect();
        let rms: Vec<f64> = used.iter().map(|r| r.rms).collect();
        let slopes: Vec<f64> = used.iter().filter_map(|r| r.slope).collect();
        let intercepts: Vec<f64> = used.iter().filter_map(|r| r.intercept).collect();
        let nonempty = |v: &[f64], f: fn(&[f64]) -> f64| (!v.is_empty()).then(|| f(v));
        Self {
            dim: first.dim,
            density: first.density,
            effective_density: first.effective_density,
            distribution: first.distribution.clone(),
            sample_count: records.len(),
            failures,
            degenerate,
            used: used.len(),
            rms_median: nonempty(&rms, stats::median),
            rms_mean: nonempty(&rms, stats::mean),
            rms_stddev: nonempty(&rms, stats::stddev),
            slope_mean: nonempty(&slopes, stats::mean),
            intercept_mean: nonempty(&intercepts, stats::mean),
            valid: failures as f64 <= MAX_FAILURE_FRACTION * records.len() as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub cells: Vec<CellSummary>,
    /// Per-matrix records, grouped by cell in the order of `cells`.
    pub records: Vec<MatrixRecord>,
}

impl SweepResult {
    pub fn all_valid(&self) -> bool {
        self.cells.iter().all(|c| c.valid)
    }

    pub fn cell(&self, dim: usize, density: f64) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.dim == dim && c.density == density)
    }
}

fn run_one(spec: &SweepSpec, dim: usize, density: f64, sample: usize) -> MatrixRecord {
    let ensemble = spec.ensemble(dim, density, sample);
    let generated = match spec.diagonal_width {
        None => generate(&ensemble),
        Some(width) => {
            let mut dd = DiagDominantSpec {
                base: ensemble.clone(),
                diagonal_width: 0.0,
            };
            dd.diagonal_width = match width {
                DiagonalWidth::Absolute(w) => w,
                DiagonalWidth::Relative(k) => k * dd.off_diagonal_scale(),
            };
            generate_diag_dominant(&dd)
        }
    };
    let outcome = match generated {
        Err(e) => Outcome::GenerationFailed {
            reason: e.to_string(),
        },
        Ok(m) => {
            let cfg = LanczosConfig {
                seed: seed::combine(&[spec.lanczos.seed, ensemble.seed]),
                ..spec.lanczos
            };
            match solve(&m, spec.method, &cfg) {
                Err(e) => Outcome::SolverFailed {
                    reason: e.to_string(),
                },
                Ok(pair) => match analyze(&m, &pair) {
                    Ok(report) => Outcome::Ok { report },
                    Err(e) => Outcome::SolverFailed {
                        reason: e.to_string(),
                    },
                },
            }
        }
    };
    MatrixRecord {
        dim,
        density,
        effective_density: ensemble.effective_density(),
        distribution: spec.distribution.label().to_string(),
        sample,
        seed: ensemble.seed,
        outcome,
    }
}

/// Runs every `(dim, density)` cell with `samples` matrices each.
///
/// Per-matrix failures are recorded, not propagated; a cell with more than
/// 10% failures is marked invalid.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult, ScalingError> {
    spec.validate()?;
    let jobs: Vec<(usize, f64, usize)> = spec
        .dims
        .iter()
        .flat_map(|&dim| {
            spec.densities
                .iter()
                .flat_map(move |&density| (0..spec.samples).map(move |k| (dim, density, k)))
        })
        .collect();
    let records: Vec<MatrixRecord> = jobs
        .par_iter()
        .map(|&(dim, density, k)| run_one(spec, dim, density, k))
        .collect();
    let cells = records
        .chunks(spec.samples)
        .map(CellSummary::from_records)
        .collect();
    Ok(SweepResult { cells, records })
}
