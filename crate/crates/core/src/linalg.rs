//! Dense symmetric linear algebra used by the loss decomposition and the
//! quadratic relaxation.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigenpairs of a symmetric matrix; `vectors.column(k)` pairs with `values[k]`.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Off-diagonal Frobenius mass below which the Jacobi sweeps stop.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

fn off_diagonal_mass(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigensolver.
///
/// Sweeps over all `(p, q)` pairs applying plane rotations until the
/// off-diagonal mass drops below `JACOBI_TOLERANCE` relative to the matrix
/// scale (absolute for matrices of norm below one).
pub fn jacobi_eigen(matrix: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(Error::validation("eigendecomposition needs a square matrix"));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("matrix has non-finite entries"));
    }
    let scale = matrix.norm().max(1.0);
    let mut a = matrix.clone();
    let mut v = DMatrix::<f64>::identity(n, n);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_mass(&a) <= JACOBI_TOLERANCE * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if off_diagonal_mass(&a) > 1e3 * JACOBI_TOLERANCE * scale {
        return Err(Error::validation("Jacobi iteration did not converge"));
    }
    Ok(SymmetricEigen { values: (0..n).map(|i| a[(i, i)]).collect(), vectors: v })
}

/// Largest absolute eigenvalue of a symmetric matrix by power iteration.
///
/// Runs at most `max_iter` iterations, stopping once the estimate changes by
/// less than `rel_tol` relative.
pub fn spectral_norm_symmetric(a: &DMatrix<f64>, max_iter: usize, rel_tol: f64) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    // Iterate on A^2 so that eigenvalues of opposite signs do not oscillate.
    let mut x = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.618_033_988_75).fract());
    x /= x.norm();
    let mut estimate = 0.0;
    for _ in 0..max_iter {
        let y = a * &x;
        let z = a * &y;
        let norm = z.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm.sqrt();
        x = z / norm;
        let done = (next - estimate).abs() <= rel_tol * next;
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(e: &SymmetricEigen) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&DVector::from_vec(e.values.clone()));
        &e.vectors * d * e.vectors.transpose()
    }

    #[test]
    fn two_by_two_swap_has_eigenvalues_plus_minus_one() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = jacobi_eigen(&a).unwrap();
        let mut vals = e.values.clone();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        assert!((reconstruct(&e) - a).abs().max() < 1e-14);
    }

    #[test]
    fn jacobi_reconstructs_and_is_orthonormal() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 1.0, 1.0, 0.0, 2.0, 1.0, 2.0, 0.0]);
        let e = jacobi_eigen(&a).unwrap();
        assert!((reconstruct(&e) - &a).abs().max() < 1e-12);
        let gram = e.vectors.transpose() * &e.vectors;
        assert!((gram - DMatrix::identity(3, 3)).abs().max() < 1e-12);
    }

    #[test]
    fn power_iteration_agrees_with_jacobi() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.5, -1.0, -3.0, 0.0, 0.5, 0.0, 1.0]);
        let rho = jacobi_eigen(&a).unwrap().values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let est = spectral_norm_symmetric(&a, 200, 1e-10);
        assert!((est - rho).abs() < 1e-6 * rho, "{est} vs {rho}");
    }

    #[test]
    fn rejects_non_square() {
        assert!(jacobi_eigen(&DMatrix::zeros(2, 3)).is_err());
    }
}
