//! Sparse Cholesky factorization `A = L Lᵀ` for SPD matrices given by their
//! upper triangle in CSC format.
//!
//! Up-looking algorithm: the rows of `L` are computed one at a time; the
//! nonzero pattern of each row is obtained by walking the elimination tree,
//! so no ordering heuristic or symbolic fill beyond the exact pattern is
//! needed. Columns of `L` are stored with the diagonal entry first, which
//! makes the two triangular solves simple column sweeps.

use super::sparse::CscMatrix;
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct SparseCholesky {
    n: usize,
    colptr: Vec<usize>,
    rowidx: Vec<u32>,
    values: Vec<f64>,
}

impl SparseCholesky {
    /// Factors a symmetric positive definite matrix given as upper CSC.
    pub fn factor(upper: &CscMatrix) -> Result<Self> {
        assert_eq!(upper.n_rows, upper.n_cols, "matrix must be square");
        let n = upper.n_rows;
        let parent = etree(upper);

        // Symbolic pass: count the entries of every column of L.
        let mut counts = vec![1usize; n]; // diagonals
        {
            let mut mark = vec![NONE; n];
            for k in 0..n {
                mark[k] = k as u32;
                for (i, _) in upper.col(k) {
                    let mut i = i as u32;
                    while i != NONE && (i as usize) < k && mark[i as usize] != k as u32 {
                        counts[i as usize] += 1;
                        mark[i as usize] = k as u32;
                        i = parent[i as usize];
                    }
                }
            }
        }
        let mut colptr = vec![0usize; n + 1];
        for j in 0..n {
            colptr[j + 1] = colptr[j] + counts[j];
        }
        let nnz = colptr[n];
        let mut rowidx = vec![0u32; nnz];
        let mut values = vec![0.0f64; nnz];

        // Numeric pass.
        let mut head: Vec<usize> = colptr[..n].to_vec(); // next free slot per column
        let mut x = vec![0.0f64; n]; // dense scratch row
        let mut mark = vec![NONE; n];
        let mut pattern: Vec<u32> = Vec::with_capacity(64);
        for k in 0..n {
            // Scatter A(0..k, k) and pick up the diagonal.
            let mut d = 0.0;
            mark[k] = k as u32;
            pattern.clear();
            for (i, v) in upper.col(k) {
                if i == k {
                    d = v;
                } else if i < k {
                    x[i] = v;
                    // Walk the elimination tree towards the root; the visited
                    // nodes form the nonzero pattern of row k of L.
                    let mut t = i as u32;
                    while t != NONE && (t as usize) < k && mark[t as usize] != k as u32 {
                        pattern.push(t);
                        mark[t as usize] = k as u32;
                        t = parent[t as usize];
                    }
                } else {
                    return Err(Error::Incompatible(
                        "factor() expects the upper triangle only".into(),
                    ));
                }
            }
            // The sparse solve needs the pattern in dependency order;
            // ancestors in the elimination tree always carry larger indices,
            // so ascending index order is a topological order.
            pattern.sort_unstable();

            for &ju in pattern.iter() {
                let j = ju as usize;
                let pj = colptr[j];
                let ljj = values[pj];
                let lkj = x[j] / ljj;
                x[j] = 0.0;
                for p in (pj + 1)..head[j] {
                    x[rowidx[p] as usize] -= values[p] * lkj;
                }
                d -= lkj * lkj;
                rowidx[head[j]] = k as u32;
                values[head[j]] = lkj;
                head[j] += 1;
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { column: k, pivot: d });
            }
            rowidx[head[k]] = k as u32;
            values[head[k]] = d.sqrt();
            head[k] += 1;
        }

        Ok(SparseCholesky { n, colptr, rowidx, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        // Forward: L z = b.
        for j in 0..self.n {
            let pj = self.colptr[j];
            let zj = b[j] / self.values[pj];
            b[j] = zj;
            for p in (pj + 1)..self.colptr[j + 1] {
                b[self.rowidx[p] as usize] -= self.values[p] * zj;
            }
        }
        // Backward: Lᵀ x = z.
        for j in (0..self.n).rev() {
            let pj = self.colptr[j];
            let mut s = b[j];
            for p in (pj + 1)..self.colptr[j + 1] {
                s -= self.values[p] * b[self.rowidx[p] as usize];
            }
            b[j] = s / self.values[pj];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solves `A X = B` for `w` right-hand sides stored column-major in a
    /// contiguous block (`B[i + c*n]`). Processing the whole block during a
    /// single sweep over `L` amortizes the memory traffic of the factor.
    pub fn solve_block_in_place(&self, b: &mut [f64], w: usize) {
        assert_eq!(b.len(), self.n * w);
        let n = self.n;
        for j in 0..n {
            let pj = self.colptr[j];
            let d = self.values[pj];
            for c in 0..w {
                let zj = b[c * n + j] / d;
                b[c * n + j] = zj;
                if zj != 0.0 {
                    let col = &mut b[c * n..(c + 1) * n];
                    for p in (pj + 1)..self.colptr[j + 1] {
                        col[self.rowidx[p] as usize] -= self.values[p] * zj;
                    }
                }
            }
        }
        for j in (0..n).rev() {
            let pj = self.colptr[j];
            let d = self.values[pj];
            for c in 0..w {
                let col = &mut b[c * n..(c + 1) * n];
                let mut s = col[j];
                for p in (pj + 1)..self.colptr[j + 1] {
                    s -= self.values[p] * col[self.rowidx[p] as usize];
                }
                col[j] = s / d;
            }
        }
    }
}

/// Elimination tree of a symmetric matrix given by its upper triangle.
fn etree(upper: &CscMatrix) -> Vec<u32> {
    let n = upper.n_cols;
    let mut parent = vec![NONE; n];
    let mut ancestor = vec![NONE; n];
    for k in 0..n {
        for (i, _) in upper.col(k) {
            let mut i = i as u32;
            while i != NONE && (i as usize) < k {
                let next = ancestor[i as usize];
                ancestor[i as usize] = k as u32;
                if next == NONE {
                    parent[i as usize] = k as u32;
                }
                i = next;
            }
        }
    }
    parent
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Triplets;
    use nalgebra::{DMatrix, DVector};

    fn random_spd(n: usize, seed: u64) -> DMatrix<f64> {
        let mut state = seed;
        let mut rand = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let g = DMatrix::from_fn(n, n, |_, _| rand());
        &g * g.transpose() + DMatrix::identity(n, n) * n as f64
    }

    fn to_upper_csc(m: &DMatrix<f64>, drop_tol: f64) -> CscMatrix {
        let n = m.nrows();
        let mut t = Triplets::new(n, n);
        for j in 0..n {
            for i in 0..=j {
                if m[(i, j)].abs() > drop_tol {
                    t.push(i, j, m[(i, j)]);
                }
            }
        }
        t.into_upper_csc()
    }

    #[test]
    fn dense_oracle_agreement() {
        for (n, seed) in [(5usize, 1u64), (20, 2), (40, 3)] {
            let a = random_spd(n, seed);
            let chol = SparseCholesky::factor(&to_upper_csc(&a, 0.0)).unwrap();
            let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
            let x = chol.solve(&b);
            let x_ref = a
                .clone()
                .cholesky()
                .unwrap()
                .solve(&DVector::from_column_slice(&b));
            for i in 0..n {
                assert!(
                    (x[i] - x_ref[i]).abs() < 1e-10 * (1.0 + x_ref[i].abs()),
                    "n={n} i={i}: {} vs {}",
                    x[i],
                    x_ref[i]
                );
            }
        }
    }

    #[test]
    fn sparse_banded_with_wraparound() {
        // Periodic 1D Laplacian + identity: band plus corner entries, the
        // same coupling topology as the periodic angular direction.
        let n = 50;
        let mut t = Triplets::new(n, n);
        for i in 0..n {
            t.push(i, i, 3.0);
            t.push(i.min((i + 1) % n), i.max((i + 1) % n), -1.0);
        }
        let upper = t.into_upper_csc();
        let chol = SparseCholesky::factor(&upper).unwrap();
        let b = vec![1.0; n];
        let x = chol.solve(&b);
        // Row sums of A are 1 for this matrix, so x = 1 exactly.
        for xi in &x {
            assert!((xi - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_matrix_rejected() {
        let mut t = Triplets::new(2, 2);
        t.push(0, 0, 1.0);
        t.push(0, 1, 2.0);
        t.push(1, 1, 1.0);
        let res = SparseCholesky::factor(&t.into_upper_csc());
        assert!(matches!(res, Err(Error::NotPositiveDefinite { column: 1, .. })));
    }

    #[test]
    fn block_solve_matches_single_solves() {
        let n = 30;
        let a = random_spd(n, 7);
        let chol = SparseCholesky::factor(&to_upper_csc(&a, 0.4)).ok();
        // Thresholded matrix may lose definiteness; fall back to full.
        let (a, chol) = match chol {
            Some(c) => (a, c),
            None => {
                let a = random_spd(n, 8);
                let c = SparseCholesky::factor(&to_upper_csc(&a, 0.0)).unwrap();
                (a, c)
            }
        };
        let _ = a;
        let w = 5;
        let mut block = vec![0.0; n * w];
        for c in 0..w {
            for i in 0..n {
                block[c * n + i] = ((i * c + 1) as f64 * 0.3).cos();
            }
        }
        let singles: Vec<Vec<f64>> =
            (0..w).map(|c| chol.solve(&block[c * n..(c + 1) * n])).collect();
        chol.solve_block_in_place(&mut block, w);
        for c in 0..w {
            for i in 0..n {
                assert!((block[c * n + i] - singles[c][i]).abs() < 1e-13);
            }
        }
    }
}
