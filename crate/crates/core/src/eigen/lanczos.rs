//! Thick-restart Lanczos with full reorthogonalisation.
//!
//! Every new basis vector is orthogonalised twice against the whole basis,
//! and the projected matrix is filled from the actual Gram–Schmidt
//! coefficients. It is tridiagonal until the first restart and arrow-shaped
//! afterwards; both cases go through the same dense Rayleigh–Ritz step.
//! At a restart the lowest half of the Ritz vectors is kept, together with
//! the current residual direction.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    dot, fix_sign, normalize, residual_norm, EigenError, EigenPair, LanczosConfig, Method,
    DEGENERACY_GAP,
};
use crate::matcore::SymMatrix;

const START_NOISE: f64 = 1e-3;

/// Normalised all-ones vector plus seeded noise.
pub(super) fn start_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n)
        .map(|_| 1.0 + START_NOISE * rng.random_range(-1.0..1.0))
        .collect();
    normalize(&mut v).expect("start vector is nonzero");
    v
}

struct Ritz {
    values: Vec<f64>,
    /// Column `k` holds the coordinates of Ritz vector `k` in the basis.
    vectors: DMatrix<f64>,
}

fn rayleigh_ritz(t: &DMatrix<f64>, k: usize) -> Ritz {
    let sub = t.view((0, 0), (k, k)).into_owned();
    let eig = SymmetricEigen::new(sub);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(k, k, |r, c| eig.eigenvectors[(r, order[c])]);
    Ritz { values, vectors }
}

fn combine(basis: &[Vec<f64>], coeffs: impl Iterator<Item = f64>) -> Vec<f64> {
    let n = basis[0].len();
    let mut out = vec![0.0; n];
    for (v, c) in basis.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

/// Orthogonalises `w` against `basis` twice; returns the accumulated
/// projection coefficients.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (c, v) in coeffs.iter_mut().zip(basis) {
            let h = dot(v, w);
            *c += h;
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= h * vi;
            }
        }
    }
    coeffs
}

pub(super) fn minimum_eigenpair(
    m: &SymMatrix,
    cfg: &LanczosConfig,
) -> Result<EigenPair, EigenError> {
    let n = m.dim();
    let capacity = cfg.restart_dim.min(n);
    let keep = (capacity / 2).max(1);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(capacity);
    basis.push(start_vector(n, cfg.seed));
    let mut t = DMatrix::<f64>::zeros(capacity, capacity);
    let mut w = vec![0.0; n];
    let mut iterations = 0;
    let mut best_residual = f64::INFINITY;
    let mut fresh = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);

    loop {
        let j = basis.len() - 1;
        m.matvec_into(&basis[j], &mut w);
        iterations += 1;
        let hv_norm = dot(&w, &w).sqrt();
        let coeffs = orthogonalize(&basis, &mut w);
        for (i, &h) in coeffs.iter().enumerate() {
            t[(i, j)] = h;
            t[(j, i)] = h;
        }
        let beta = dot(&w, &w).sqrt();
        let k = j + 1;
        let invariant = k == n || beta <= 64.0 * f64::EPSILON * hv_norm;

        let ritz = rayleigh_ritz(&t, k);
        let theta = ritz.values[0];
        let estimate = if invariant {
            0.0
        } else {
            (beta * ritz.vectors[(k - 1, 0)]).abs()
        };
        best_residual = best_residual.min(estimate);

        if estimate <= cfg.threshold(theta) {
            let mut g = combine(&basis, ritz.vectors.column(0).iter().copied());
            normalize(&mut g)?;
            fix_sign(&mut g);
            let hg = m.matvec(&g);
            let value = dot(&g, &hg);
            let residual = residual_norm(m, value, &g);
            best_residual = best_residual.min(residual);
            if residual <= cfg.threshold(value) {
                let degenerate =
                    k > 1 && ritz.values[1] - theta < DEGENERACY_GAP * theta.abs().max(1.0);
                return Ok(EigenPair {
                    value,
                    vector: g,
                    method: Method::Lanczos,
                    residual,
                    degenerate,
                    iterations,
                });
            }
        }

        if iterations >= cfg.max_iterations {
            return Err(EigenError::NoConvergence {
                iterations,
                best_residual,
            });
        }

        if k < capacity && !invariant {
            w.iter_mut().for_each(|x| *x /= beta);
            basis.push(w.clone());
            continue;
        }

        // Restart: lock the lowest Ritz vectors, then continue from the
        // residual direction, or from a random direction when the Krylov
        // space went invariant without meeting the tolerance.
        let locked = keep.min(k);
        let next: Vec<Vec<f64>> = (0..locked)
            .map(|c| combine(&basis, ritz.vectors.column(c).iter().copied()))
            .collect();
        basis = next;
        t.fill(0.0);
        for (i, &theta_i) in ritz.values.iter().take(locked).enumerate() {
            t[(i, i)] = theta_i;
        }
        let mut direction = if invariant {
            let mut r: Vec<f64> = (0..n).map(|_| fresh.random_range(-1.0..1.0)).collect();
            orthogonalize(&basis, &mut r);
            r
        } else {
            w.clone()
        };
        if basis.len() >= n || normalize(&mut direction).is_err() {
            return Err(EigenError::NoConvergence {
                iterations,
                best_residual,
            });
        }
        basis.push(direction);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{generate, EnsembleSpec};

    #[test]
    fn start_vector_is_near_uniform() {
        let v = start_vector(400, 3);
        let u = 1.0 / 20.0;
        assert!((dot(&v, &v) - 1.0).abs() < 1e-14);
        assert!(v.iter().all(|x| (x - u).abs() < 2.0 * START_NOISE * u));
        assert_eq!(v, start_vector(400, 3));
        assert_ne!(v, start_vector(400, 4));
    }

    #[test]
    fn small_restart_dimension_still_converges() {
        let m = generate(&EnsembleSpec::gaussian(150, 12).with_density(0.3)).unwrap();
        let tight = LanczosConfig {
            restart_dim: 8,
            max_iterations: 2000,
            ..Default::default()
        };
        let wide = ground_state_for_test(&m, &LanczosConfig::default());
        let narrow = ground_state_for_test(&m, &tight);
        assert!((wide.value - narrow.value).abs() <= 1e-10 * wide.value.abs());
    }

    fn ground_state_for_test(m: &SymMatrix, cfg: &LanczosConfig) -> EigenPair {
        minimum_eigenpair(m, cfg).unwrap()
    }
}
