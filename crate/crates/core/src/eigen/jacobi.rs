/// Cyclic Jacobi diagonalisation of a full row-major symmetric matrix.
///
/// Returns `(eigenvalues, eigenvectors, sweeps)`. Eigenvalues are unsorted;
/// column `k` of the row-major eigenvector matrix belongs to eigenvalue `k`.
/// Sweeps continue until every off-diagonal element has been rotated to
/// exactly zero or is negligible against both diagonal elements it couples.
pub fn jacobi_eigen(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>, usize) {
    const MAX_SWEEPS: usize = 100;
    assert_eq!(a.len(), n * n);

    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q] * a[p * n + q])
            .sum();
        if off == 0.0 {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let g = 100.0 * apq.abs();
                if sweeps > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }

    let values = (0..n).map(|i| a[i * n + i]).collect();
    (values, v, sweeps)
}

/// Applies the rotation annihilating `a[p][q]`.
fn rotate(a: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.is_infinite() {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_p = c * akp - s * akq;
        let new_q = s * akp + c * akq;
        a[k * n + p] = new_p;
        a[p * n + k] = new_p;
        a[k * n + q] = new_q;
        a[q * n + k] = new_q;
    }
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalises_small_matrix() {
        // Eigenvalues of [[2,1,0],[1,2,1],[0,1,2]] are 2 - √2, 2, 2 + √2.
        let a = vec![2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0];
        let (mut values, v, _) = jacobi_eigen(a.clone(), 3);
        for k in 0..3 {
            for i in 0..3 {
                let av: f64 = (0..3).map(|j| a[i * 3 + j] * v[j * 3 + k]).sum();
                assert!((av - values[k] * v[i * 3 + k]).abs() < 1e-14);
            }
        }
        values.sort_by(f64::total_cmp);
        let r = std::f64::consts::SQRT_2;
        assert!((values[0] - (2.0 - r)).abs() < 1e-14);
        assert!((values[1] - 2.0).abs() < 1e-14);
        assert!((values[2] - (2.0 + r)).abs() < 1e-14);
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let n = 6;
        let a: Vec<f64> = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                -(((i * 7 + j * 7 + i * j) % 11) as f64) / 3.0
            })
            .collect();
        let (_, v, _) = jacobi_eigen(a, n);
        for p in 0..n {
            for q in 0..n {
                let d: f64 = (0..n).map(|k| v[k * n + p] * v[k * n + q]).sum();
                assert!((d - if p == q { 1.0 } else { 0.0 }).abs() < 1e-13);
            }
        }
    }
}
