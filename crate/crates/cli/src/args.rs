use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eigenscale::matcore::{DensityMode, Distribution, RowScale};
use eigenscale::{LanczosConfig, Method};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "eigenscale",
    version,
    about = "Ground-state eigenvectors versus row sums"
)]
pub struct Cli {
    /// Worker threads; 0 uses every core. EIGENSCALE_THREADS overrides it.
    #[arg(long, global = true, default_value_t = 0)]
    pub parallelism: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one random matrix and write it to a file.
    Gen(GenArgs),
    /// Run an ensemble sweep and report scaling statistics.
    Scaling(ScalingArgs),
    /// Build a model Hamiltonian, solve it and fit the variational ansatz.
    #[command(subcommand)]
    Model(ModelCommand),
    /// Solve a matrix file and report its scaling statistics as JSON.
    Solve(SolveArgs),
    /// Rerun the configuration stored in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistKind {
    Uniform,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Lanczos,
    Dense,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Lanczos => Method::Lanczos,
            MethodArg::Dense => Method::DenseOracle,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DistArgs {
    #[arg(long, value_enum, default_value_t = DistKind::Uniform)]
    pub dist: DistKind,
    /// Lower bound of the uniform distribution on [xmin, 0].
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub xmin: f64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub mean: f64,
    #[arg(long, default_value_t = 1.0)]
    pub stddev: f64,
}

impl DistArgs {
    pub fn distribution(&self) -> Distribution {
        match self.dist {
            DistKind::Uniform => Distribution::uniform(self.xmin),
            DistKind::Gaussian => Distribution::gaussian(self.mean, self.stddev),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 500)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 64)]
    pub restart_dim: usize,
    /// Seed of the Lanczos start-vector noise.
    #[arg(long, default_value_t = 0)]
    pub solver_seed: u64,
}

impl SolverArgs {
    pub fn config(&self) -> LanczosConfig {
        LanczosConfig {
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
            restart_dim: self.restart_dim,
            seed: self.solver_seed,
        }
    }
}

/// `--inverse-n` flag as a density mode.
pub fn density_mode(inverse_n: bool) -> DensityMode {
    if inverse_n {
        DensityMode::InverseN
    } else {
        DensityMode::Fixed
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub dim: usize,
    #[command(flatten)]
    pub dist: DistArgs,
    #[arg(long, default_value_t = 1.0)]
    pub density: f64,
    /// Scale the density as 1/N relative to N = 100.
    #[arg(long)]
    pub inverse_n: bool,
    /// Multiply row and column ROW by FACTOR; repeatable.
    #[arg(long = "rowscale", value_name = "ROW:FACTOR")]
    pub row_scale: Vec<RowScale>,
    /// Replace the diagonal by uniform draws from [-W, W].
    #[arg(long, value_name = "W")]
    pub diag_dominant: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ScalingArgs {
    /// Comma-separated matrix dimensions.
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    #[command(flatten)]
    pub dist: DistArgs,
    /// Comma-separated densities.
    #[arg(
        long,
        alias = "densities",
        value_delimiter = ',',
        default_value = "1.0"
    )]
    pub density: Vec<f64>,
    #[arg(long)]
    pub inverse_n: bool,
    #[arg(long = "rowscale", value_name = "ROW:FACTOR")]
    pub row_scale: Vec<RowScale>,
    /// Diagonal drawn from [-W, W].
    #[arg(long, value_name = "W", conflicts_with = "diag_dominant_factor")]
    pub diag_dominant: Option<f64>,
    /// Diagonal width as a multiple of N·ρ·E|x|.
    #[arg(long, value_name = "K")]
    pub diag_dominant_factor: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::Lanczos)]
    pub method: MethodArg,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Per-matrix rows go here, cell aggregates to `<out>.cells.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum ModelCommand {
    /// Hubbard ring in the occupation-number basis.
    Hubbard(HubbardArgs),
    /// Transverse-field Ising ring in the σᶻ basis.
    Ising(IsingArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelOutputArgs {
    /// Solver; by default dense for small bases and Lanczos otherwise.
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Per-state rows go here, the summary to `<out>.summary.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the Hamiltonian in matrix file format.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct HubbardArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub u: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 4)]
    pub sites: usize,
    #[arg(long, default_value_t = 2)]
    pub n_up: usize,
    #[arg(long, default_value_t = 2)]
    pub n_down: usize,
    /// Periodic instead of anti-periodic boundary.
    #[arg(long)]
    pub periodic: bool,
    #[command(flatten)]
    pub output: ModelOutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct IsingArgs {
    #[arg(long)]
    pub length: usize,
    #[arg(long, default_value_t = 10.0)]
    pub g: f64,
    #[command(flatten)]
    pub output: ModelOutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Lanczos)]
    pub method: MethodArg,
    /// Also fit the row-sum ansatz.
    #[arg(long)]
    pub variational: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Model runs only: write the Hamiltonian here as well.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
}
