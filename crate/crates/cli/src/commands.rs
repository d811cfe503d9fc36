use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use eigenscale::eigen::{solve, EigenPair};
use eigenscale::matcore::{
    generate, generate_diag_dominant, read_matrix, write_matrix, DiagDominantSpec,
};
use eigenscale::models::{build_hubbard, build_ising};
use eigenscale::scaling::{analyze, normalize_s, sweep, ScalingReport};
use eigenscale::varmin::optimize;
use eigenscale::{Method, SymMatrix, VariationalResult};
use serde::Serialize;

use crate::args::{Cli, Command, Format, ModelCommand};
use crate::config::{
    sidecar, GenConfig, Manifest, ModelConfig, ModelSpec, RunConfig, ScalingConfig, SolveConfig,
};
use crate::error::CliError;
use crate::output::{self, StateRow, SummaryRow};

pub const THREADS_ENV: &str = "EIGENSCALE_THREADS";

/// Bases up to this size are solved densely when no method is given.
pub const MODEL_DENSE_LIMIT: usize = 256;

/// Where a command writes its data.
#[derive(Debug, Clone, Default)]
pub struct Destinations {
    pub out: Option<PathBuf>,
    pub matrix_out: Option<PathBuf>,
}

/// Files written plus a non-fatal status to report after the manifest.
struct Written {
    files: Vec<PathBuf>,
    status: Result<(), CliError>,
}

impl Written {
    fn ok(files: Vec<PathBuf>) -> Self {
        Self {
            files,
            status: Ok(()),
        }
    }
}

fn emit(path: Option<&Path>, bytes: &[u8], files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, bytes)
                .map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?;
            files.push(p.to_path_buf());
        }
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn write_matrix_file(m: &SymMatrix, path: &Path, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let mut bytes = Vec::new();
    write_matrix(m, &mut bytes)?;
    emit(Some(path), &bytes, files)
}

fn run_gen(cfg: &GenConfig, dest: &Destinations) -> Result<Written, CliError> {
    let out = dest
        .out
        .as_deref()
        .ok_or_else(|| CliError::Usage("gen needs --out".into()))?;
    let m = match cfg.diagonal_width {
        None => generate(&cfg.ensemble)?,
        Some(w) => generate_diag_dominant(&DiagDominantSpec {
            base: cfg.ensemble.clone(),
            diagonal_width: w,
        })?,
    };
    let mut files = Vec::new();
    write_matrix_file(&m, out, &mut files)?;
    Ok(Written::ok(files))
}

fn run_scaling(cfg: &ScalingConfig, dest: &Destinations) -> Result<Written, CliError> {
    let result = sweep(&cfg.sweep)?;
    let mut files = Vec::new();
    match cfg.format {
        Format::Json => emit(dest.out.as_deref(), &json_bytes(&result)?, &mut files)?,
        Format::Csv => {
            let records = output::records_csv(&result.records)?;
            let cells = output::cells_csv(&result.cells)?;
            match dest.out.as_deref() {
                Some(out) => {
                    emit(Some(out), &records, &mut files)?;
                    emit(Some(&sidecar(out, "cells.csv")), &cells, &mut files)?;
                }
                None => {
                    let mut all = records;
                    all.push(b'\n');
                    all.extend_from_slice(&cells);
                    emit(None, &all, &mut files)?;
                }
            }
        }
    }
    let invalid: Vec<String> = result
        .cells
        .iter()
        .filter(|c| !c.valid)
        .map(|c| format!("(dim {}, density {})", c.dim, c.density))
        .collect();
    let status = if invalid.is_empty() {
        Ok(())
    } else {
        Err(CliError::Data(format!(
            "cells with more than 10% failed matrices: {}",
            invalid.join(", ")
        )))
    };
    Ok(Written { files, status })
}

#[derive(Serialize)]
struct ModelJson<'a> {
    model: ModelSpec,
    summary: &'a SummaryRow,
    states: &'a [StateRow],
}

/// Exact and variational solution of a model Hamiltonian.
pub struct ModelSolution {
    pub matrix: SymMatrix,
    pub exact: EigenPair,
    pub variational: VariationalResult,
    pub summary: SummaryRow,
    pub states: Vec<StateRow>,
}

pub fn solve_model(cfg: &ModelConfig) -> Result<ModelSolution, CliError> {
    let matrix = match &cfg.model {
        ModelSpec::Hubbard(h) => build_hubbard(h)?,
        ModelSpec::Ising(i) => build_ising(i)?,
    };
    let method = cfg.method.unwrap_or(if matrix.dim() <= MODEL_DENSE_LIMIT {
        Method::DenseOracle
    } else {
        Method::Lanczos
    });
    let exact = solve(&matrix, method, &cfg.lanczos)?;
    let variational = optimize(&matrix)?.with_exact(exact.value);
    let s = normalize_s(&matrix.row_sums())?;
    let sites = cfg.model.sites() as f64;
    let summary = SummaryRow {
        model: cfg.model.label().into(),
        dim: matrix.dim(),
        sites: cfg.model.sites(),
        c: variational.c,
        e_scaling: variational.energy / sites,
        e_exact: exact.value / sites,
        relative_error: variational.relative_error,
        e_scaling_total: variational.energy,
        e_exact_total: exact.value,
        degenerate_ansatz: variational.degenerate_ansatz,
    };
    let states = (0..matrix.dim())
        .map(|i| StateRow {
            index: i,
            g: exact.vector[i],
            s: s[i],
            g_var: variational.vector[i],
        })
        .collect();
    Ok(ModelSolution {
        matrix,
        exact,
        variational,
        summary,
        states,
    })
}

fn run_model(cfg: &ModelConfig, dest: &Destinations) -> Result<Written, CliError> {
    let sol = solve_model(cfg)?;
    let mut files = Vec::new();
    if let Some(path) = dest.matrix_out.as_deref() {
        write_matrix_file(&sol.matrix, path, &mut files)?;
    }
    match cfg.format {
        Format::Json => {
            let doc = ModelJson {
                model: cfg.model,
                summary: &sol.summary,
                states: &sol.states,
            };
            emit(dest.out.as_deref(), &json_bytes(&doc)?, &mut files)?;
        }
        Format::Csv => {
            let states = output::states_csv(&sol.states)?;
            let summary = output::summary_csv(&sol.summary)?;
            match dest.out.as_deref() {
                Some(out) => {
                    emit(Some(out), &states, &mut files)?;
                    emit(Some(&sidecar(out, "summary.csv")), &summary, &mut files)?;
                }
                None => {
                    let mut all = states;
                    all.push(b'\n');
                    all.extend_from_slice(&summary);
                    emit(None, &all, &mut files)?;
                }
            }
        }
    }
    Ok(Written::ok(files))
}

#[derive(Serialize)]
struct VariationalJson {
    c: Option<f64>,
    energy: f64,
    degenerate_ansatz: bool,
    exact_energy: Option<f64>,
    relative_error: Option<f64>,
}

#[derive(Serialize)]
struct SolveJson {
    dim: usize,
    method: Method,
    lambda_min: f64,
    residual: f64,
    iterations: usize,
    degenerate: bool,
    report: ScalingReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    variational: Option<VariationalJson>,
}

fn run_solve(cfg: &SolveConfig, dest: &Destinations) -> Result<Written, CliError> {
    let file = std::fs::File::open(&cfg.input)
        .map_err(|e| CliError::Input(format!("{}: {e}", cfg.input.display())))?;
    let m = read_matrix(std::io::BufReader::new(file))?;
    let pair = solve(&m, cfg.method, &cfg.lanczos)?;
    let report = analyze(&m, &pair)?;
    let variational = if cfg.variational {
        let v = optimize(&m)?.with_exact(pair.value);
        Some(VariationalJson {
            c: v.c,
            energy: v.energy,
            degenerate_ansatz: v.degenerate_ansatz,
            exact_energy: v.exact_energy,
            relative_error: v.relative_error,
        })
    } else {
        None
    };
    let doc = SolveJson {
        dim: m.dim(),
        method: pair.method,
        lambda_min: pair.value,
        residual: pair.residual,
        iterations: pair.iterations,
        degenerate: pair.degenerate,
        report,
        variational,
    };
    let mut files = Vec::new();
    emit(dest.out.as_deref(), &json_bytes(&doc)?, &mut files)?;
    Ok(Written::ok(files))
}

fn execute(cfg: &RunConfig, dest: &Destinations) -> Result<Written, CliError> {
    match cfg {
        RunConfig::Gen(c) => run_gen(c, dest),
        RunConfig::Scaling(c) => run_scaling(c, dest),
        RunConfig::Model(c) => run_model(c, dest),
        RunConfig::Solve(c) => run_solve(c, dest),
    }
}

/// Runs `cfg` and, when data goes to a file, writes `<out>.manifest.json`.
pub fn run_config(cfg: &RunConfig, dest: &Destinations) -> Result<(), CliError> {
    let start = Instant::now();
    let written = execute(cfg, dest)?;
    if let Some(out) = dest.out.as_deref() {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: cfg.clone(),
            outputs: written.files,
            threads: rayon::current_num_threads(),
            wall_time_seconds: start.elapsed().as_secs_f64(),
        };
        let path = sidecar(out, "manifest.json");
        std::fs::write(&path, json_bytes(&manifest)?)
            .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    }
    written.status
}

/// Worker count: `EIGENSCALE_THREADS` if set, else `--parallelism`.
pub fn thread_count(flag: usize, env: Option<&str>) -> Result<usize, CliError> {
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be an integer, got {v:?}"))),
        None => Ok(flag),
    }
}

fn resolve(command: Command) -> Result<(RunConfig, Destinations), CliError> {
    Ok(match command {
        Command::Gen(a) => (
            RunConfig::Gen(GenConfig::from_args(&a)),
            Destinations {
                out: Some(a.out),
                matrix_out: None,
            },
        ),
        Command::Scaling(a) => (
            RunConfig::Scaling(ScalingConfig::from_args(&a)),
            Destinations {
                out: a.out,
                matrix_out: None,
            },
        ),
        Command::Model(ModelCommand::Hubbard(a)) => (
            RunConfig::Model(ModelConfig::hubbard(&a)),
            Destinations {
                out: a.output.out,
                matrix_out: a.output.matrix_out,
            },
        ),
        Command::Model(ModelCommand::Ising(a)) => (
            RunConfig::Model(ModelConfig::ising(&a)),
            Destinations {
                out: a.output.out,
                matrix_out: a.output.matrix_out,
            },
        ),
        Command::Solve(a) => (
            RunConfig::Solve(SolveConfig::from_args(&a)),
            Destinations {
                out: a.out,
                matrix_out: None,
            },
        ),
        Command::Replay(a) => (
            Manifest::read(&a.manifest)?.config,
            Destinations {
                out: a.out,
                matrix_out: a.matrix_out,
            },
        ),
    })
}

/// Parses `args` (program name first) and runs the command in-process.
pub fn run_from<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    run(cli)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let env = std::env::var(THREADS_ENV).ok();
    let threads = thread_count(cli.parallelism, env.as_deref())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} workers: {e}")))?;
    let (cfg, dest) = resolve(cli.command)?;
    pool.install(|| run_config(&cfg, &dest))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn environment_overrides_flag() {
        assert_eq!(thread_count(3, None).unwrap(), 3);
        assert_eq!(thread_count(3, Some("8")).unwrap(), 8);
        assert_eq!(thread_count(0, Some(" 2 ")).unwrap(), 2);
        assert_eq!(thread_count(3, Some("many")).unwrap_err().exit_code(), 2);
    }
}
