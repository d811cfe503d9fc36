//! Resolved run configurations and the manifest written next to outputs.

use std::path::{Path, PathBuf};

use eigenscale::matcore::EnsembleSpec;
use eigenscale::scaling::{DiagonalWidth, SweepSpec};
use eigenscale::{HubbardSpec, IsingSpec, LanczosConfig, Method};
use serde::{Deserialize, Serialize};

use crate::args::{density_mode, Format, GenArgs, HubbardArgs, IsingArgs, ScalingArgs, SolveArgs};
use crate::error::CliError;
use eigenscale::models::Boundary;

/// Everything that determines a command's data output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunConfig {
    Gen(GenConfig),
    Scaling(ScalingConfig),
    Model(ModelConfig),
    Solve(SolveConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub ensemble: EnsembleSpec,
    pub diagonal_width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub sweep: SweepSpec,
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Hubbard(HubbardSpec),
    Ising(IsingSpec),
}

impl ModelSpec {
    pub fn label(&self) -> &'static str {
        match self {
            ModelSpec::Hubbard(_) => "hubbard",
            ModelSpec::Ising(_) => "ising",
        }
    }

    pub fn sites(&self) -> usize {
        match self {
            ModelSpec::Hubbard(h) => h.sites,
            ModelSpec::Ising(i) => i.length,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub model: ModelSpec,
    /// `None` picks the solver by basis size.
    pub method: Option<Method>,
    pub lanczos: LanczosConfig,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub input: PathBuf,
    pub method: Method,
    pub variational: bool,
    pub lanczos: LanczosConfig,
}

impl GenConfig {
    pub fn from_args(a: &GenArgs) -> Self {
        Self {
            ensemble: EnsembleSpec {
                dim: a.dim,
                distribution: a.dist.distribution(),
                density: a.density,
                density_mode: density_mode(a.inverse_n),
                row_scale: a.row_scale.clone(),
                seed: a.seed,
            },
            diagonal_width: a.diag_dominant,
        }
    }
}

impl ScalingConfig {
    pub fn from_args(a: &ScalingArgs) -> Self {
        let diagonal_width = match (a.diag_dominant, a.diag_dominant_factor) {
            (Some(w), _) => Some(DiagonalWidth::Absolute(w)),
            (None, Some(k)) => Some(DiagonalWidth::Relative(k)),
            (None, None) => None,
        };
        Self {
            sweep: SweepSpec {
                dims: a.dims.clone(),
                densities: a.density.clone(),
                density_mode: density_mode(a.inverse_n),
                distribution: a.dist.distribution(),
                row_scale: a.row_scale.clone(),
                diagonal_width,
                samples: a.samples,
                global_seed: a.seed,
                method: a.method.into(),
                lanczos: a.solver.config(),
            },
            format: a.format,
        }
    }
}

impl ModelConfig {
    pub fn hubbard(a: &HubbardArgs) -> Self {
        Self {
            model: ModelSpec::Hubbard(HubbardSpec {
                sites: a.sites,
                n_up: a.n_up,
                n_down: a.n_down,
                t: a.t,
                u: a.u,
                boundary: if a.periodic {
                    Boundary::Periodic
                } else {
                    Boundary::AntiPeriodic
                },
            }),
            method: a.output.method.map(Into::into),
            lanczos: a.output.solver.config(),
            format: a.output.format,
        }
    }

    pub fn ising(a: &IsingArgs) -> Self {
        Self {
            model: ModelSpec::Ising(IsingSpec::new(a.length, a.g)),
            method: a.output.method.map(Into::into),
            lanczos: a.output.solver.config(),
            format: a.output.format,
        }
    }
}

impl SolveConfig {
    pub fn from_args(a: &SolveArgs) -> Self {
        Self {
            input: a.input.clone(),
            method: a.method.into(),
            variational: a.variational,
            lanczos: a.solver.config(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub outputs: Vec<PathBuf>,
    pub threads: usize,
    pub wall_time_seconds: f64,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("{}: invalid manifest: {e}", path.display())))
    }
}

/// Parses manifest text without touching the filesystem.
pub fn parse_manifest(text: &str) -> Result<Manifest, serde_json::Error> {
    serde_json::from_str(text)
}

/// `path` with `.suffix` appended to its file name.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".");
    name.push(suffix);
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_appends_suffix() {
        assert_eq!(
            sidecar(Path::new("out/run.csv"), "manifest.json"),
            PathBuf::from("out/run.csv.manifest.json")
        );
        assert_eq!(
            sidecar(Path::new("m.sc"), "cells.csv"),
            PathBuf::from("m.sc.cells.csv")
        );
    }

    #[test]
    fn manifest_roundtrip() {
        let m = Manifest {
            tool: "eigenscale".into(),
            version: "0.1.0".into(),
            config: RunConfig::Model(ModelConfig {
                model: ModelSpec::Ising(IsingSpec::new(4, 10.0)),
                method: None,
                lanczos: LanczosConfig::default(),
                format: Format::Csv,
            }),
            outputs: vec![PathBuf::from("a.csv")],
            threads: 2,
            wall_time_seconds: 0.5,
        };
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(parse_manifest(&text).unwrap(), m);
        assert!(text.contains("\"command\":\"model\""));
    }
}
