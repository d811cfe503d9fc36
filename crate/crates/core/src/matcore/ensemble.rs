use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use serde::{Deserialize, Serialize};

use super::{Entry, MatrixError, SymMatrix, DENSE_DIM_LIMIT};

/// In [`DensityMode::InverseN`] the nominal density applies at this dimension.
pub const INVERSE_N_REFERENCE_DIM: usize = 100;

/// Matrices whose effective density falls below this are stored sparse.
const SPARSE_DENSITY_THRESHOLD: f64 = 0.25;

// Stream layout of the counter-based generator. Row `i` draws its values
// from stream `2i` and its thinning mask from `2i + 1`, so every element is
// reproducible regardless of traversal order and thinning a matrix never
// changes the values that survive.
const DIAGONAL_STREAM: u64 = 1 << 63;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Distribution {
    /// Every element uniform on `[x_min, 0]`.
    Uniform { x_min: f64 },
    /// Every element drawn from `Normal(mean, stddev²)`; positive draws are kept.
    Gaussian { mean: f64, stddev: f64 },
}

impl Distribution {
    pub fn uniform(x_min: f64) -> Self {
        Distribution::Uniform { x_min }
    }

    pub fn gaussian(mean: f64, stddev: f64) -> Self {
        Distribution::Gaussian { mean, stddev }
    }

    /// Short label used in CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            Distribution::Uniform { .. } => "uniform",
            Distribution::Gaussian { .. } => "gaussian",
        }
    }

    /// `E[|X|]` of a single element.
    pub fn mean_abs(&self) -> f64 {
        match *self {
            Distribution::Uniform { x_min } => x_min.abs() / 2.0,
            Distribution::Gaussian { mean, stddev } => {
                // Folded normal.
                let z = mean / (stddev * std::f64::consts::SQRT_2);
                stddev * (2.0 / std::f64::consts::PI).sqrt() * (-z * z).exp()
                    + mean * statrs::function::erf::erf(z)
            }
        }
    }

    fn validate(&self) -> Result<(), MatrixError> {
        match *self {
            Distribution::Uniform { x_min } if !(x_min < 0.0 && x_min.is_finite()) => Err(
                MatrixError::InvalidSpec(format!("uniform x_min must be negative, got {x_min}")),
            ),
            Distribution::Gaussian { mean, stddev }
                if !(mean.is_finite() && stddev > 0.0 && stddev.is_finite()) =>
            {
                Err(MatrixError::InvalidSpec(format!(
                    "gaussian needs finite mean and positive stddev, got ({mean}, {stddev})"
                )))
            }
            _ => Ok(()),
        }
    }
}

impl Default for Distribution {
    fn default() -> Self {
        Distribution::Uniform { x_min: -1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMode {
    #[default]
    Fixed,
    /// Effective density `min(1, ρ·100/N)`.
    InverseN,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowScale {
    pub row: usize,
    pub factor: f64,
}

impl RowScale {
    pub fn new(row: usize, factor: f64) -> Self {
        Self { row, factor }
    }
}

impl std::str::FromStr for RowScale {
    type Err = String;

    /// Parses `row:factor`, e.g. `3:10` or `7:0.1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (row, factor) = s
            .split_once(':')
            .ok_or_else(|| format!("expected ROW:FACTOR, got {s:?}"))?;
        let row = row
            .trim()
            .parse::<usize>()
            .map_err(|e| format!("bad row index {row:?}: {e}"))?;
        let factor = factor
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad factor {factor:?}: {e}"))?;
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(format!("factor must be positive and finite, got {factor}"));
        }
        Ok(Self { row, factor })
    }
}

/// Recipe for one random matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub dim: usize,
    pub distribution: Distribution,
    pub density: f64,
    #[serde(default)]
    pub density_mode: DensityMode,
    #[serde(default)]
    pub row_scale: Vec<RowScale>,
    pub seed: u64,
}

impl EnsembleSpec {
    /// Dense uniform ensemble on `[-1, 0]`.
    pub fn uniform(dim: usize, seed: u64) -> Self {
        Self {
            dim,
            distribution: Distribution::default(),
            density: 1.0,
            density_mode: DensityMode::Fixed,
            row_scale: Vec::new(),
            seed,
        }
    }

    /// Dense Gaussian ensemble with mean −2 and standard deviation 1.
    pub fn gaussian(dim: usize, seed: u64) -> Self {
        Self {
            distribution: Distribution::gaussian(-2.0, 1.0),
            ..Self::uniform(dim, seed)
        }
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.density = density;
        self
    }

    pub fn with_density_mode(mut self, mode: DensityMode) -> Self {
        self.density_mode = mode;
        self
    }

    pub fn with_row_scale(mut self, row_scale: Vec<RowScale>) -> Self {
        self.row_scale = row_scale;
        self
    }

    /// Density actually applied at this dimension.
    pub fn effective_density(&self) -> f64 {
        match self.density_mode {
            DensityMode::Fixed => self.density,
            DensityMode::InverseN => {
                (self.density * INVERSE_N_REFERENCE_DIM as f64 / self.dim as f64).min(1.0)
            }
        }
    }

    pub fn validate(&self) -> Result<(), MatrixError> {
        if self.dim < 2 {
            return Err(MatrixError::DimensionTooSmall(self.dim));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(MatrixError::InvalidSpec(format!(
                "density must lie in (0, 1], got {}",
                self.density
            )));
        }
        self.distribution.validate()?;
        let mut seen = std::collections::BTreeSet::new();
        for s in &self.row_scale {
            if s.row >= self.dim {
                return Err(MatrixError::InvalidSpec(format!(
                    "row scale index {} out of range for dimension {}",
                    s.row, self.dim
                )));
            }
            if !seen.insert(s.row) {
                return Err(MatrixError::InvalidSpec(format!(
                    "row scale index {} given twice",
                    s.row
                )));
            }
            if !(s.factor > 0.0 && s.factor.is_finite()) {
                return Err(MatrixError::InvalidSpec(format!(
                    "row scale factor must be positive, got {}",
                    s.factor
                )));
            }
        }
        Ok(())
    }

    fn stores_sparse(&self) -> bool {
        self.effective_density() < SPARSE_DENSITY_THRESHOLD || self.dim > DENSE_DIM_LIMIT
    }
}

/// Diagonal-dominant variant: the diagonal is redrawn uniformly from `[−W, W]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagDominantSpec {
    pub base: EnsembleSpec,
    pub diagonal_width: f64,
}

impl DiagDominantSpec {
    /// Expected magnitude of an off-diagonal row sum, `N·ρ·E[|element|]`.
    pub fn off_diagonal_scale(&self) -> f64 {
        self.base.dim as f64 * self.base.effective_density() * self.base.distribution.mean_abs()
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

enum Sampler {
    Uniform(f64),
    Gaussian(Normal<f64>),
}

impl Sampler {
    fn new(d: &Distribution) -> Self {
        match *d {
            Distribution::Uniform { x_min } => Sampler::Uniform(x_min),
            Distribution::Gaussian { mean, stddev } => {
                Sampler::Gaussian(Normal::new(mean, stddev).expect("validated parameters"))
            }
        }
    }

    #[inline]
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            // u in [0, 1) maps onto (x_min, 0].
            Sampler::Uniform(x_min) => x_min * rng.random::<f64>(),
            Sampler::Gaussian(n) => n.sample(rng),
        }
    }
}

/// Draws the matrix described by `spec`.
///
/// Fails with [`MatrixError::DegenerateEnsemble`] when thinning leaves the
/// off-diagonal graph disconnected.
pub fn generate(spec: &EnsembleSpec) -> Result<SymMatrix, MatrixError> {
    spec.validate()?;
    let m = draw_elements(spec, None)?;
    finish(spec, m)
}

/// Draws a diagonal-dominant matrix. A width of zero leaves the base
/// ensemble untouched.
pub fn generate_diag_dominant(spec: &DiagDominantSpec) -> Result<SymMatrix, MatrixError> {
    spec.base.validate()?;
    let w = spec.diagonal_width;
    if w == 0.0 {
        return generate(&spec.base);
    }
    let scale = spec.off_diagonal_scale();
    if !(w.is_finite() && w > scale) {
        return Err(MatrixError::InvalidSpec(format!(
            "diagonal width {w} must exceed the off-diagonal row-sum scale {scale}"
        )));
    }
    let m = draw_elements(&spec.base, Some(w))?;
    finish(&spec.base, m)
}

fn finish(spec: &EnsembleSpec, m: SymMatrix) -> Result<SymMatrix, MatrixError> {
    let components = m.component_count();
    if components != 1 {
        return Err(MatrixError::DegenerateEnsemble { components });
    }
    if spec.row_scale.is_empty() {
        Ok(m)
    } else {
        m.scale_rows(&spec.row_scale)
    }
}

fn draw_elements(spec: &EnsembleSpec, diag_width: Option<f64>) -> Result<SymMatrix, MatrixError> {
    let n = spec.dim;
    let density = spec.effective_density();
    let sampler = Sampler::new(&spec.distribution);
    let mut diag_rng = diag_width.map(|w| (w, stream_rng(spec.seed, DIAGONAL_STREAM)));
    let sparse = spec.stores_sparse();

    let mut packed = if sparse {
        Vec::new()
    } else {
        Vec::with_capacity(n * (n + 1) / 2)
    };
    let mut entries = Vec::new();

    for i in 0..n {
        let mut values = stream_rng(spec.seed, 2 * i as u64);
        let mut mask = (density < 1.0).then(|| stream_rng(spec.seed, 2 * i as u64 + 1));
        for j in 0..=i {
            let mut v = sampler.draw(&mut values);
            if let Some(mask) = mask.as_mut() {
                if mask.random::<f64>() >= density {
                    v = 0.0;
                }
            }
            if i == j {
                if let Some((w, rng)) = diag_rng.as_mut() {
                    v = rng.random_range(-*w..=*w);
                }
            }
            if sparse {
                if v != 0.0 {
                    entries.push(Entry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            } else {
                packed.push(v);
            }
        }
    }

    if sparse {
        Ok(SymMatrix::from_sorted_entries(n, entries))
    } else {
        SymMatrix::from_packed_lower(n, packed)
    }
}

/// Fraction of positive elements among the nonzero off-diagonals.
pub fn positive_off_diagonal_fraction(m: &SymMatrix) -> f64 {
    let (mut positive, mut nonzero) = (0usize, 0usize);
    m.for_each_lower(|i, j, v| {
        if i != j && v != 0.0 {
            nonzero += 1;
            if v > 0.0 {
                positive += 1;
            }
        }
    });
    if nonzero == 0 {
        0.0
    } else {
        positive as f64 / nonzero as f64
    }
}
