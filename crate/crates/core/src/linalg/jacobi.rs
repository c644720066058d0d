//! Cyclic Jacobi eigenvalue iteration for dense symmetric matrices.
//!
//! Eigenvalues only — the inf-sup analysis needs the spectrum, not the
//! eigenvectors. Matrix orders stay in the low thousands, where Jacobi is
//! simple, robust, and accurate down to round-off in the smallest
//! eigenvalues.

use crate::{Error, Result};
use nalgebra::DMatrix;

const MAX_SWEEPS: usize = 50;

/// Eigenvalues of a symmetric matrix, sorted ascending.
pub fn sym_eigenvalues(mat: &DMatrix<f64>) -> Result<Vec<f64>> {
    assert_eq!(mat.nrows(), mat.ncols(), "matrix must be square");
    let n = mat.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if mat.iter().any(|v| !v.is_finite()) {
        return Err(Error::Incompatible("eigensolver input contains non-finite entries".into()));
    }

    // Row-major full copy, symmetrized to remove assembly round-off.
    let mut a = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (mat[(i, j)] + mat[(j, i)]);
        }
    }

    let mut converged = false;
    for sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off == 0.0 {
            converged = true;
            break;
        }
        // Rotation threshold: aggressive on early sweeps, then anything
        // nonzero (Numerical Recipes scheduling).
        let thresh = if sweep < 3 { 0.2 * off.sqrt() / (n * n) as f64 } else { 0.0 };

        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Tiny off-diagonal relative to the diagonal: flush to zero.
                if sweep >= 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if apq.abs() <= thresh || apq == 0.0 {
                    continue;
                }
                rotated = true;

                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta.abs() + g == theta.abs() {
                    // Large |theta|: avoid overflow of theta^2.
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;

                a[p * n + p] = app - h;
                a[q * n + q] = aqq + h;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                // Rotate the remaining entries of rows/columns p and q.
                for j in 0..n {
                    if j == p || j == q {
                        continue;
                    }
                    let ajp = a[j * n + p];
                    let ajq = a[j * n + q];
                    let new_p = ajp - s * (ajq + tau * ajp);
                    let new_q = ajq + s * (ajp - tau * ajq);
                    a[j * n + p] = new_p;
                    a[p * n + j] = new_p;
                    a[j * n + q] = new_q;
                    a[q * n + j] = new_q;
                }
            }
        }

        if !rotated && sweep >= 3 {
            converged = true;
            break;
        }
    }
    if !converged {
        let off: f64 =
            (0..n).flat_map(|p| ((p + 1)..n).map(move |q| (p, q))).map(|(p, q)| a[p * n + q].powi(2)).sum();
        if off != 0.0 {
            return Err(Error::EigNotConverged { sweeps: MAX_SWEEPS });
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn diagonal_matrix_is_its_own_spectrum() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![4.0, 1.0, 9.0]));
        let eig = sym_eigenvalues(&m).unwrap();
        assert_eq!(eig, vec![1.0, 4.0, 9.0]);
    }

    #[test]
    fn two_by_two_hand_example() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let eig = sym_eigenvalues(&m).unwrap();
        assert!((eig[0] - 1.0).abs() < 1e-14);
        assert!((eig[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn zero_and_empty() {
        let eig = sym_eigenvalues(&DMatrix::zeros(4, 4)).unwrap();
        assert_eq!(eig, vec![0.0; 4]);
        assert!(sym_eigenvalues(&DMatrix::zeros(0, 0)).unwrap().is_empty());
    }

    #[test]
    fn non_finite_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, f64::NAN, f64::NAN, 1.0]);
        assert!(sym_eigenvalues(&m).is_err());
    }

    #[test]
    fn agrees_with_nalgebra_on_random_symmetric() {
        let mut state = 42u64;
        let mut rand = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in [3usize, 10, 37, 80] {
            let g = DMatrix::from_fn(n, n, |_, _| rand());
            let m = &g + g.transpose();
            let mut reference: Vec<f64> =
                m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            reference.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let eig = sym_eigenvalues(&m).unwrap();
            let scale = reference.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            for (e, r) in eig.iter().zip(&reference) {
                assert!((e - r).abs() < 1e-11 * scale, "n={n}: {e} vs {r}");
            }
        }
    }

    #[test]
    fn rank_deficient_spectrum_has_tiny_minimum() {
        // Gram matrix of 5 vectors spanning only 3 dimensions.
        let mut state = 3u64;
        let mut rand = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let g = DMatrix::from_fn(5, 3, |_, _| rand());
        let m = &g * g.transpose();
        let eig = sym_eigenvalues(&m).unwrap();
        assert!(eig[0].abs() < 1e-14 * eig[4].abs());
        assert!(eig[1].abs() < 1e-14 * eig[4].abs());
        assert!(eig[2] > 1e-6 * eig[4]);
    }
}
