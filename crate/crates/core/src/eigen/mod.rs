//! Minimum-eigenvalue solvers.
//!
//! [`ground_state`] runs Lanczos and is the production path. [`dense_ground_state`]
//! diagonalises the full matrix with cyclic Jacobi rotations; it shares no code
//! with the Lanczos path and serves as the oracle in tests.

mod jacobi;
mod lanczos;

pub use jacobi::jacobi_eigen;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcore::{SymMatrix, DENSE_DIM_LIMIT};

/// Relative eigenvalue gap below which the ground state is reported degenerate.
pub const DEGENERACY_GAP: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("no convergence after {iterations} iterations (best residual {best_residual:e})")]
    NoConvergence {
        iterations: usize,
        best_residual: f64,
    },
    #[error("dimension {0} too large for the dense solver (limit {DENSE_DIM_LIMIT})")]
    DimensionTooLargeForDense(usize),
    #[error("zero vector")]
    ZeroVector,
    #[error("vector length {got} does not match matrix dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lanczos,
    #[serde(rename = "dense")]
    DenseOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanczosConfig {
    /// Total matrix-vector products allowed across restarts.
    pub max_iterations: usize,
    /// Relative residual target: `‖Hg − λg‖ ≤ tolerance·max(1, |λ|)`.
    pub tolerance: f64,
    /// Krylov basis size at which the iteration restarts.
    pub restart_dim: usize,
    /// Seed of the start-vector perturbation.
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-10,
            restart_dim: 64,
            seed: 0,
        }
    }
}

impl LanczosConfig {
    pub fn validate(&self) -> Result<(), EigenError> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(EigenError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.restart_dim < 8 {
            return Err(EigenError::InvalidConfig(format!(
                "restart dimension must be at least 8, got {}",
                self.restart_dim
            )));
        }
        if self.max_iterations == 0 {
            return Err(EigenError::InvalidConfig(
                "max_iterations must be positive".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn threshold(&self, lambda: f64) -> f64 {
        self.tolerance * lambda.abs().max(1.0)
    }
}

/// Minimum eigenvalue with its unit eigenvector.
///
/// The vector follows the sign convention of [`fix_sign`]: its largest
/// magnitude component is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub method: Method,
    /// `‖Hg − λg‖₂` as computed from the returned pair.
    pub residual: f64,
    /// Set when the next eigenvalue lies within the degeneracy gap.
    pub degenerate: bool,
    /// Matrix-vector products (Lanczos) or sweeps (Jacobi).
    pub iterations: usize,
}

/// Ground state by Lanczos iteration.
pub fn ground_state(m: &SymMatrix, cfg: &LanczosConfig) -> Result<EigenPair, EigenError> {
    cfg.validate()?;
    lanczos::minimum_eigenpair(m, cfg)
}

/// Ground state by full Jacobi diagonalisation.
pub fn dense_ground_state(m: &SymMatrix) -> Result<EigenPair, EigenError> {
    let n = m.dim();
    if n > DENSE_DIM_LIMIT {
        return Err(EigenError::DimensionTooLargeForDense(n));
    }
    let (values, vectors, sweeps) = jacobi_eigen(m.to_full(), n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let k = order[0];
    let mut g: Vec<f64> = (0..n).map(|r| vectors[r * n + k]).collect();
    normalize(&mut g)?;
    fix_sign(&mut g);
    let value = values[k];
    let degenerate = n > 1 && values[order[1]] - value < DEGENERACY_GAP * value.abs().max(1.0);
    Ok(EigenPair {
        value,
        residual: residual_norm(m, value, &g),
        vector: g,
        method: Method::DenseOracle,
        degenerate,
        iterations: sweeps,
    })
}

pub fn solve(m: &SymMatrix, method: Method, cfg: &LanczosConfig) -> Result<EigenPair, EigenError> {
    match method {
        Method::Lanczos => ground_state(m, cfg),
        Method::DenseOracle => dense_ground_state(m),
    }
}

/// `vᵀHv / vᵀv`.
pub fn rayleigh_quotient(m: &SymMatrix, v: &[f64]) -> Result<f64, EigenError> {
    if v.len() != m.dim() {
        return Err(EigenError::LengthMismatch {
            expected: m.dim(),
            got: v.len(),
        });
    }
    let vv = dot(v, v);
    if vv == 0.0 {
        return Err(EigenError::ZeroVector);
    }
    Ok(dot(v, &m.matvec(v)) / vv)
}

/// `‖Hg − λg‖₂`.
pub fn residual_norm(m: &SymMatrix, lambda: f64, g: &[f64]) -> f64 {
    m.matvec(g)
        .iter()
        .zip(g)
        .map(|(hg, gi)| {
            let r = hg - lambda * gi;
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

/// Flips `v` so that its largest-magnitude component (first one on ties)
/// is positive.
pub fn fix_sign(v: &mut [f64]) {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &x in v.iter() {
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// `|⟨a, b⟩| / (‖a‖‖b‖)`.
pub fn overlap(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b).abs() / (dot(a, a) * dot(b, b)).sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn normalize(v: &mut [f64]) -> Result<f64, EigenError> {
    let norm = dot(v, v).sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(EigenError::ZeroVector);
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Ok(norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{generate, EnsembleSpec};

    fn pair() -> SymMatrix {
        SymMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap()
    }

    #[test]
    fn diagonal_matrix() {
        let m = SymMatrix::from_diagonal(&[1.0, 2.0, 3.0]).unwrap();
        for p in [
            ground_state(&m, &LanczosConfig::default()).unwrap(),
            dense_ground_state(&m).unwrap(),
        ] {
            assert!((p.value - 1.0).abs() < 1e-14, "{:?}", p);
            assert!((p.vector[0] - 1.0).abs() < 1e-12);
            assert!(p.vector[1].abs() < 1e-12 && p.vector[2].abs() < 1e-12);
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for p in [
            ground_state(&pair(), &LanczosConfig::default()).unwrap(),
            dense_ground_state(&pair()).unwrap(),
        ] {
            assert!((p.value + 1.0).abs() < 1e-14);
            assert!((p.vector[0] - h).abs() < 1e-12 && (p.vector[1] - h).abs() < 1e-12);
            assert!(!p.degenerate);
        }
    }

    #[test]
    fn lanczos_matches_dense_oracle_n200() {
        let m = generate(&EnsembleSpec::uniform(200, 2024)).unwrap();
        let l = ground_state(&m, &LanczosConfig::default()).unwrap();
        let d = dense_ground_state(&m).unwrap();
        assert!(
            (l.value - d.value).abs() <= 1e-10,
            "{} vs {}",
            l.value,
            d.value
        );
        assert!(overlap(&l.vector, &d.vector) >= 1.0 - 1e-10);
        assert_eq!(l.method, Method::Lanczos);
        assert_eq!(d.method, Method::DenseOracle);
    }

    #[test]
    fn residual_is_recomputable() {
        let m = generate(&EnsembleSpec::gaussian(120, 8).with_density(0.2)).unwrap();
        let cfg = LanczosConfig::default();
        let p = ground_state(&m, &cfg).unwrap();
        assert!(p.residual <= cfg.threshold(p.value));
        assert!((residual_norm(&m, p.value, &p.vector) - p.residual).abs() <= 1e-14);
        assert!((dot(&p.vector, &p.vector).sqrt() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn rayleigh_quotient_cases() {
        let m = SymMatrix::from_diagonal(&[1.0, 2.0]).unwrap();
        assert_eq!(rayleigh_quotient(&m, &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(
            rayleigh_quotient(&m, &[0.0, 0.0]),
            Err(EigenError::ZeroVector)
        );
        assert!(rayleigh_quotient(&m, &[1.0]).is_err());

        let r = generate(&EnsembleSpec::uniform(100, 77)).unwrap();
        let exact = dense_ground_state(&r).unwrap();
        let rq = rayleigh_quotient(&r, &exact.vector).unwrap();
        assert!((rq - exact.value).abs() <= 1e-12 * exact.value.abs());
    }

    #[test]
    fn dense_solver_rejects_large_dimension() {
        let m = SymMatrix::from_triplets(DENSE_DIM_LIMIT + 1, [(1, 0, -1.0)]).unwrap();
        assert_eq!(
            dense_ground_state(&m),
            Err(EigenError::DimensionTooLargeForDense(DENSE_DIM_LIMIT + 1))
        );
    }

    #[test]
    fn no_convergence_is_reported() {
        let m = generate(&EnsembleSpec::gaussian(300, 1)).unwrap();
        let cfg = LanczosConfig {
            max_iterations: 3,
            ..Default::default()
        };
        assert!(matches!(
            ground_state(&m, &cfg),
            Err(EigenError::NoConvergence { iterations: 3, .. })
        ));
    }

    #[test]
    fn config_validation() {
        let bad = LanczosConfig {
            restart_dim: 4,
            ..Default::default()
        };
        assert!(ground_state(&pair(), &bad).is_err());
        let bad = LanczosConfig {
            tolerance: 0.0,
            ..Default::default()
        };
        assert!(ground_state(&pair(), &bad).is_err());
    }

    #[test]
    fn degenerate_ground_state_flagged_by_oracle() {
        let m = SymMatrix::from_diagonal(&[-1.0, -1.0, 2.0]).unwrap();
        assert!(dense_ground_state(&m).unwrap().degenerate);
    }

    #[test]
    fn sign_convention() {
        let mut v = vec![0.1, -0.9, 0.3];
        fix_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.3]);
        let mut tie = vec![-0.5, 0.5];
        fix_sign(&mut tie);
        assert_eq!(tie, vec![0.5, -0.5]);
    }

    #[test]
    fn hard_gap_converges_with_restarts() {
        // Diagonal-dominant spectra have a small relative gap at the bottom.
        use crate::matcore::{generate_diag_dominant, DiagDominantSpec};
        let spec = DiagDominantSpec {
            base: EnsembleSpec::uniform(300, 5),
            diagonal_width: 10.0 * 300.0 * 0.5,
        };
        let m = generate_diag_dominant(&spec).unwrap();
        let cfg = LanczosConfig {
            max_iterations: 5000,
            ..Default::default()
        };
        let l = ground_state(&m, &cfg).unwrap();
        let d = dense_ground_state(&m).unwrap();
        assert!((l.value - d.value).abs() <= 1e-9 * d.value.abs());
        assert!(overlap(&l.vector, &d.vector) >= 1.0 - 1e-10);
    }
}
