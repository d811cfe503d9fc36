//! Ground-state estimate from row sums alone.
//!
//! The trial vector is `v(c) = ŝ + c·1`, where `ŝ = −S/‖S‖` is the
//! normalised row-sum vector oriented like the (non-negative) ground state.
//! The Rayleigh quotient of `v(c)` is minimised over `c` in closed form,
//! including the limit `c → ±∞` where `v ∝ 1`.
//!
//! The quadratic for the stationary points is solved in the orthogonal
//! basis `{w, 1}` with `w = ŝ − mean(ŝ)·1`. In the raw `{ŝ, 1}` basis its
//! leading coefficient is a difference of two nearly equal numbers whenever
//! `ŝ` is close to uniform, which is exactly the regime of interest.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eigen::{dot, fix_sign, normalize, rayleigh_quotient, EigenError};
use crate::matcore::SymMatrix;
use crate::scaling::{normalize_s, ScalingError};

/// Angle (radians) under which `ŝ` counts as parallel to the all-ones vector.
pub const PARALLEL_ANGLE: f64 = 1e-10;

/// Smallest trial-vector norm accepted by [`evaluate_at`].
const MIN_TRIAL_NORM: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VarminError {
    #[error("trial vector vanishes")]
    ZeroVector,
    #[error(transparent)]
    RowSums(#[from] ScalingError),
}

impl From<EigenError> for VarminError {
    fn from(_: EigenError) -> Self {
        VarminError::ZeroVector
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalResult {
    /// Optimal shift; `None` when the optimum is the uniform vector
    /// (`c → ±∞`) or the ansatz is degenerate.
    pub c: Option<f64>,
    /// Rayleigh quotient of the optimal trial vector.
    pub energy: f64,
    /// Unit trial vector, largest component positive.
    pub vector: Vec<f64>,
    /// `ŝ` is parallel to the all-ones vector, so `c` has no meaning.
    pub degenerate_ansatz: bool,
    pub exact_energy: Option<f64>,
    pub relative_error: Option<f64>,
}

impl VariationalResult {
    pub fn with_exact(mut self, exact: f64) -> Self {
        self.exact_energy = Some(exact);
        self.relative_error = Some(((self.energy - exact) / exact).abs());
        self
    }
}

/// `ŝ = −S/‖S‖`.
pub fn oriented_row_sums(m: &SymMatrix) -> Result<Vec<f64>, VarminError> {
    Ok(normalize_s(&m.row_sums())?.iter().map(|x| -x).collect())
}

/// Rayleigh quotient of `ŝ + c·1`.
pub fn evaluate_at(m: &SymMatrix, c: f64) -> Result<f64, VarminError> {
    let v: Vec<f64> = oriented_row_sums(m)?.iter().map(|x| x + c).collect();
    if dot(&v, &v).sqrt() < MIN_TRIAL_NORM {
        return Err(VarminError::ZeroVector);
    }
    Ok(rayleigh_quotient(m, &v)?)
}

fn finish(
    m: &SymMatrix,
    mut v: Vec<f64>,
    c: Option<f64>,
    degenerate: bool,
) -> Result<VariationalResult, VarminError> {
    normalize(&mut v)?;
    fix_sign(&mut v);
    Ok(VariationalResult {
        c,
        energy: rayleigh_quotient(m, &v)?,
        vector: v,
        degenerate_ansatz: degenerate,
        exact_energy: None,
        relative_error: None,
    })
}

pub fn optimize(m: &SymMatrix) -> Result<VariationalResult, VarminError> {
    let n = m.dim();
    let nf = n as f64;
    let s_hat = oriented_row_sums(m)?;
    let ones = vec![1.0; n];

    let mean = s_hat.iter().sum::<f64>() / nf;
    let w: Vec<f64> = s_hat.iter().map(|x| x - mean).collect();
    let p = dot(&w, &w);
    // ‖ŝ‖ = 1, so ‖w‖ is the sine of the angle between ŝ and 1.
    if p.sqrt() < PARALLEL_ANGLE {
        return finish(m, ones, None, true);
    }

    let hw = m.matvec(&w);
    let h1 = m.matvec(&ones);
    let a = dot(&w, &hw);
    let b = dot(&ones, &hw);
    let d = dot(&ones, &h1);

    // E(t) = (a + 2bt + dt²) / (p + N t²) for v = w + t·1; stationary points
    // solve (bN) t² + (aN − dp) t − bp = 0, whose discriminant is
    // (aN − dp)² + 4b²Np ≥ 0.
    let energy = |t: f64| (a + 2.0 * b * t + d * t * t) / (p + nf * t * t);
    let qa = b * nf;
    let qb = a * nf - d * p;
    let qc = -b * p;
    let mut candidates: Vec<f64> = Vec::with_capacity(2);
    if qa == 0.0 {
        if qb != 0.0 {
            candidates.push(-qc / qb);
        }
    } else {
        let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
        let q = -0.5 * (qb + qb.signum() * disc.sqrt());
        if q != 0.0 {
            candidates.push(q / qa);
            candidates.push(qc / q);
        } else {
            candidates.push(0.0);
        }
    }

    let uniform_energy = d / nf;
    let best = candidates
        .into_iter()
        .filter(|t| t.is_finite())
        .map(|t| (t, energy(t)))
        .min_by(|x, y| x.1.total_cmp(&y.1));

    match best {
        Some((t, e)) if e <= uniform_energy => {
            let v: Vec<f64> = w.iter().map(|x| x + t).collect();
            finish(m, v, Some(t - mean), false)
        }
        _ => finish(m, ones, None, false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{dense_ground_state, overlap};
    use crate::matcore::{generate, EnsembleSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_rows_take_the_degenerate_path() {
        let m = SymMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap();
        let r = optimize(&m).unwrap();
        assert!(r.degenerate_ansatz && r.c.is_none());
        assert_eq!(r.energy, -1.0);
    }

    #[test]
    fn closed_form_is_consistent_with_evaluate_at() {
        let m = generate(&EnsembleSpec::gaussian(60, 21)).unwrap();
        let r = optimize(&m).unwrap();
        let e = evaluate_at(&m, r.c.unwrap()).unwrap();
        assert!((e - r.energy).abs() <= 1e-12 * r.energy.abs());
    }

    #[test]
    fn grid_scan_never_beats_closed_form() {
        let m = generate(&EnsembleSpec::uniform(40, 8).with_density(0.5)).unwrap();
        let r = optimize(&m).unwrap();
        let mut best = f64::INFINITY;
        for k in 0..=20_000 {
            let c = -1.0 + k as f64 * 1e-4;
            best = best.min(evaluate_at(&m, c).unwrap());
        }
        assert!(best >= r.energy - 1e-10, "{best} < {}", r.energy);
    }

    #[test]
    fn variational_bound_and_shift_covariance() {
        let m = generate(&EnsembleSpec::uniform(50, 3)).unwrap();
        let r = optimize(&m).unwrap();
        let exact = dense_ground_state(&m).unwrap();
        assert!(r.energy >= exact.value - 1e-12 * exact.value.abs());
        let shifted = optimize(&m.shift_diagonal(-4.0)).unwrap();
        assert!((shifted.energy - (r.energy - 4.0)).abs() <= 1e-9);
        assert!(overlap(&shifted.vector, &r.vector) >= 1.0 - 1e-12);
        let rel = r.clone().with_exact(exact.value).relative_error.unwrap();
        assert!((0.0..1e-2).contains(&rel));
    }

    #[test]
    fn evaluate_at_rejects_vanishing_trial_vector() {
        // Row sums proportional to 1, and c cancelling ŝ exactly.
        let m = SymMatrix::from_rows(&[vec![-1.0, -1.0], vec![-1.0, -1.0]]).unwrap();
        let s_hat = oriented_row_sums(&m).unwrap();
        assert_eq!(evaluate_at(&m, -s_hat[0]), Err(VarminError::ZeroVector));
    }

    /// Builds `H = Σ λ_k v_k v_kᵀ` whose eigenbasis has only two vectors
    /// overlapping the all-ones vector, one of them the ground state.
    fn span_consistent_matrix(n: usize, seed: u64) -> (SymMatrix, Vec<f64>, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ones = vec![1.0; n];
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let push = |mut v: Vec<f64>, basis: &mut Vec<Vec<f64>>| {
            for _ in 0..2 {
                for b in basis.iter() {
                    let h = dot(b, &v);
                    v.iter_mut().zip(b).for_each(|(x, y)| *x -= h * y);
                }
            }
            normalize(&mut v).unwrap();
            basis.push(v);
        };
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
        push(u, &mut basis);
        push(ones.clone(), &mut basis);
        // Remaining vectors orthogonal to both, hence to 1.
        while basis.len() < n {
            let r: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            push(r, &mut basis);
        }
        let lambdas: Vec<f64> = (0..n)
            .map(|k| if k == 0 { -5.0 } else { 1.0 + k as f64 })
            .collect();
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let x: f64 = basis
                    .iter()
                    .zip(&lambdas)
                    .map(|(v, l)| l * v[i] * v[j])
                    .sum();
                rows[i][j] = x;
                rows[j][i] = x;
            }
        }
        (SymMatrix::from_rows(&rows).unwrap(), basis[0].clone(), -5.0)
    }

    #[test]
    fn exact_when_ground_state_lies_in_the_ansatz_span() {
        for seed in 0..5 {
            let (m, ground, lambda) = span_consistent_matrix(12, seed);
            let r = optimize(&m).unwrap();
            assert!(
                (r.energy - lambda).abs() <= 1e-10,
                "{} vs {lambda}",
                r.energy
            );
            assert!(overlap(&r.vector, &ground) >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn sign_of_trial_vector_is_irrelevant() {
        let m = generate(&EnsembleSpec::gaussian(30, 2)).unwrap();
        let r = optimize(&m).unwrap();
        let neg: Vec<f64> = r.vector.iter().map(|x| -x).collect();
        assert!((rayleigh_quotient(&m, &neg).unwrap() - r.energy).abs() < 1e-12);
        assert!(r.vector.iter().all(|&x| x > 0.0));
    }
}
