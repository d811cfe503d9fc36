//! How closely the ground-state vector follows the normalised row sums.
//!
//! With `s = S/‖S‖` and `g` the unit ground vector (non-negative for
//! matrices with non-positive off-diagonals), the law under test is
//! `g_i ≈ −s_i`. A report carries the least-squares line of `g` against
//! `s`, the rms distance from the fixed line `g = −s`, and rank/linear
//! correlations between `g` and `−s`.

pub mod stats;
mod sweep;

pub use sweep::{sweep, CellSummary, DiagonalWidth, MatrixRecord, Outcome, SweepResult, SweepSpec};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eigen::{EigenError, EigenPair};
use crate::matcore::{MatrixError, SymMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalingError {
    #[error("row sums vanish identically")]
    ZeroVector,
    #[error("eigenvector length {got} does not match matrix dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// `s / ‖s‖₂`, signs preserved.
pub fn normalize_s(raw: &[f64]) -> Result<Vec<f64>, ScalingError> {
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(ScalingError::ZeroVector);
    }
    Ok(raw.iter().map(|x| x / norm).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub dim: usize,
    /// Least-squares slope of `g` on `s`; absent when the fit is degenerate.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// `sqrt(Σ (g_i + s_i)² / N)`.
    pub rms: f64,
    /// Pearson correlation of `g` with `−s`.
    pub pearson: Option<f64>,
    /// Spearman correlation of `g` with `−s`.
    pub spearman: Option<f64>,
    pub lambda_min: f64,
    /// The ground state is degenerate, so `g` is not unique.
    pub degenerate_ground_state: bool,
    /// `s` has no spread, so no line can be fitted.
    pub degenerate_fit: bool,
    /// Components with `s_i > 0` (possible only with positive elements).
    pub positive_s: usize,
}

impl ScalingReport {
    /// Flagged reports are left out of ensemble statistics.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate_ground_state || self.degenerate_fit
    }
}

/// Normalised row sums and ground vector, the raw material of a report.
pub fn scaling_points(
    m: &SymMatrix,
    pair: &EigenPair,
) -> Result<(Vec<f64>, Vec<f64>), ScalingError> {
    if pair.vector.len() != m.dim() {
        return Err(ScalingError::LengthMismatch {
            expected: m.dim(),
            got: pair.vector.len(),
        });
    }
    let s = normalize_s(&m.row_sums())?;
    Ok((s, pair.vector.clone()))
}

pub fn analyze(m: &SymMatrix, pair: &EigenPair) -> Result<ScalingReport, ScalingError> {
    let (s, g) = scaling_points(m, pair)?;
    let n = s.len();
    let rms = (s
        .iter()
        .zip(&g)
        .map(|(si, gi)| (gi + si) * (gi + si))
        .sum::<f64>()
        / n as f64)
        .sqrt();
    let minus_s: Vec<f64> = s.iter().map(|x| -x).collect();

    let fit = if pair.degenerate {
        None
    } else {
        stats::least_squares(&s, &g)
    };
    Ok(ScalingReport {
        dim: n,
        slope: fit.map(|f| f.slope),
        intercept: fit.map(|f| f.intercept),
        rms,
        pearson: stats::pearson(&g, &minus_s),
        spearman: stats::spearman(&g, &minus_s),
        lambda_min: pair.value,
        degenerate_ground_state: pair.degenerate,
        degenerate_fit: !pair.degenerate && fit.is_none(),
        positive_s: s.iter().filter(|&&x| x > 0.0).count(),
    })
}

/// Report for diagonal-dominant matrices. The computation is identical to
/// [`analyze`]; in this regime only the sign of the correlations is
/// expected to survive, not the slope.
pub fn breakdown_diagnostics(
    m: &SymMatrix,
    pair: &EigenPair,
) -> Result<ScalingReport, ScalingError> {
    analyze(m, pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{dense_ground_state, ground_state, LanczosConfig, Method};
    use crate::matcore::{generate, EnsembleSpec};

    fn pair_from(vector: Vec<f64>) -> EigenPair {
        EigenPair {
            value: 0.0,
            vector,
            method: Method::DenseOracle,
            residual: 0.0,
            degenerate: false,
            iterations: 0,
        }
    }

    #[test]
    fn normalize_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = normalize_s(&[-1.0, -1.0]).unwrap();
        assert!((v[0] + h).abs() < 1e-15 && (v[1] + h).abs() < 1e-15);
        assert_eq!(normalize_s(&[3.0, 4.0]).unwrap(), vec![0.6, 0.8]);
        assert_eq!(normalize_s(&[0.0, 0.0]), Err(ScalingError::ZeroVector));
        let m = generate(&EnsembleSpec::uniform(100, 4)).unwrap();
        let s = normalize_s(&m.row_sums()).unwrap();
        assert!((s.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_law_gives_zero_rms() {
        let m = SymMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap();
        let p = dense_ground_state(&m).unwrap();
        let r = analyze(&m, &p).unwrap();
        assert!(r.rms < 1e-15);
        // Both s components are equal, so no line can be fitted.
        assert!(r.degenerate_fit);

        // Unequal row sums with g = -s exactly.
        let m = SymMatrix::from_rows(&[vec![-3.0, -1.0], vec![-1.0, -1.0]]).unwrap();
        let s = normalize_s(&m.row_sums()).unwrap();
        let g: Vec<f64> = s.iter().map(|x| -x).collect();
        let r = analyze(&m, &pair_from(g)).unwrap();
        assert!((r.slope.unwrap() + 1.0).abs() < 1e-14);
        assert!(r.intercept.unwrap().abs() < 1e-14);
        assert!(r.rms < 1e-15);
    }

    #[test]
    fn constant_offset_moves_intercept_only() {
        let m = SymMatrix::from_rows(&[
            vec![-3.0, -1.0, -0.5],
            vec![-1.0, -1.0, -0.2],
            vec![-0.5, -0.2, -2.0],
        ])
        .unwrap();
        let s = normalize_s(&m.row_sums()).unwrap();
        let eps = 0.01;
        let g: Vec<f64> = s.iter().map(|x| -x + eps).collect();
        let r = analyze(&m, &pair_from(g)).unwrap();
        assert!((r.rms - eps).abs() < 1e-15);
        assert!((r.intercept.unwrap() - eps).abs() < 1e-14);
        assert!((r.slope.unwrap() + 1.0).abs() < 1e-13);
    }

    #[test]
    fn permutation_symmetric_matrix_has_degenerate_fit() {
        let n = 6;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.5 } else { -1.0 }).collect())
            .collect();
        let m = SymMatrix::from_rows(&rows).unwrap();
        let p = ground_state(&m, &LanczosConfig::default()).unwrap();
        let u = 1.0 / (n as f64).sqrt();
        assert!(p.vector.iter().all(|x| (x - u).abs() < 1e-10));
        let r = analyze(&m, &p).unwrap();
        assert!(r.degenerate_fit && r.is_degenerate());
        assert!(r.slope.is_none() && r.spearman.is_none());
    }

    #[test]
    fn degenerate_ground_state_skips_fit() {
        let m = SymMatrix::from_diagonal(&[-1.0, -1.0, 2.0]).unwrap();
        let p = dense_ground_state(&m).unwrap();
        let r = analyze(&m, &p).unwrap();
        assert!(r.degenerate_ground_state && r.slope.is_none());
    }

    #[test]
    fn rms_squared_sums_deviations() {
        let m = generate(&EnsembleSpec::gaussian(80, 6)).unwrap();
        let p = ground_state(&m, &LanczosConfig::default()).unwrap();
        let r = analyze(&m, &p).unwrap();
        let (s, g) = scaling_points(&m, &p).unwrap();
        let direct: f64 = s.iter().zip(&g).map(|(a, b)| (a + b) * (a + b)).sum();
        assert!((r.rms * r.rms * 80.0 - direct).abs() <= 1e-14 * direct);
    }

    #[test]
    fn length_mismatch() {
        let m = SymMatrix::from_diagonal(&[-1.0, -2.0]).unwrap();
        assert!(matches!(
            analyze(&m, &pair_from(vec![1.0])),
            Err(ScalingError::LengthMismatch { .. })
        ));
    }
}
