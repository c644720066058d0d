//! Compressed sparse column matrices built from coordinate triplets.

/// Accumulator for coordinate-format entries; duplicates are summed when the
/// matrix is compressed. Entries are merged in sorted `(col, row)` order, so
/// the result is independent of insertion order up to floating-point
/// summation order, which is itself fixed by sorting.
#[derive(Debug, Clone)]
pub struct Triplets {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<(u32, u32, f64)>,
}

impl Triplets {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Triplets { n_rows, n_cols, entries: Vec::new() }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n_rows && col < self.n_cols);
        self.entries.push((row as u32, col as u32, value));
    }

    pub fn extend_from(&mut self, other: Triplets) {
        debug_assert_eq!(self.n_rows, other.n_rows);
        debug_assert_eq!(self.n_cols, other.n_cols);
        self.entries.extend(other.entries);
    }

    /// Compresses to CSC, summing duplicates.
    pub fn into_csc(mut self) -> CscMatrix {
        self.entries.sort_unstable_by_key(|&(r, c, _)| (c, r));
        let mut colptr = vec![0usize; self.n_cols + 1];
        let mut rowidx: Vec<u32> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last: Option<(u32, u32)> = None;
        for &(r, c, v) in &self.entries {
            if last == Some((c, r)) {
                *values.last_mut().unwrap() += v;
            } else {
                rowidx.push(r);
                values.push(v);
                colptr[c as usize + 1] += 1;
                last = Some((c, r));
            }
        }
        for j in 0..self.n_cols {
            colptr[j + 1] += colptr[j];
        }
        CscMatrix { n_rows: self.n_rows, n_cols: self.n_cols, colptr, rowidx, values }
    }

    /// Compresses to CSC keeping only the upper triangle (`row <= col`);
    /// used for symmetric matrices fed to the Cholesky factorization.
    pub fn into_upper_csc(mut self) -> CscMatrix {
        self.entries.retain(|&(r, c, _)| r <= c);
        self.into_csc()
    }
}

/// Sparse matrix in compressed sparse column format.
#[derive(Debug, Clone)]
pub struct CscMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub colptr: Vec<usize>,
    pub rowidx: Vec<u32>,
    pub values: Vec<f64>,
}

impl CscMatrix {
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn col(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.colptr[j], self.colptr[j + 1]);
        self.rowidx[a..b].iter().zip(&self.values[a..b]).map(|(&r, &v)| (r as usize, v))
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n_cols);
        let mut y = vec![0.0; self.n_rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for (i, v) in self.col(j) {
                    y[i] += v * xj;
                }
            }
        }
        y
    }

    /// `xᵀ A y` for a symmetric matrix stored as its upper triangle.
    pub fn sym_upper_quadratic_form(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(self.n_rows, self.n_cols);
        let mut total = 0.0;
        for j in 0..self.n_cols {
            for (i, v) in self.col(j) {
                total += if i == j { v * x[i] * y[j] } else { v * (x[i] * y[j] + x[j] * y[i]) };
            }
        }
        total
    }

    /// `y = A x` for a symmetric matrix stored as its upper triangle.
    pub fn sym_upper_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(self.n_rows, self.n_cols);
        debug_assert_eq!(x.len(), self.n_cols);
        let mut y = vec![0.0; self.n_rows];
        for j in 0..self.n_cols {
            for (i, v) in self.col(j) {
                y[i] += v * x[j];
                if i != j {
                    y[j] += v * x[i];
                }
            }
        }
        y
    }

    /// Dense copy of the full symmetric matrix from its upper triangle.
    pub fn sym_upper_to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n_rows, self.n_cols);
        for j in 0..self.n_cols {
            for (i, v) in self.col(j) {
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    /// Maximum absolute asymmetry `max |A_ij − A_ji|` of a full-storage
    /// square matrix.
    pub fn max_asymmetry(&self) -> f64 {
        assert_eq!(self.n_rows, self.n_cols);
        let dense_transposed_lookup = |i: usize, j: usize| -> f64 {
            let (a, b) = (self.colptr[j], self.colptr[j + 1]);
            match self.rowidx[a..b].binary_search(&(i as u32)) {
                Ok(p) => self.values[a + p],
                Err(_) => 0.0,
            }
        };
        let mut worst: f64 = 0.0;
        for j in 0..self.n_cols {
            for (i, v) in self.col(j) {
                worst = worst.max((v - dense_transposed_lookup(j, i)).abs());
            }
        }
        worst
    }

    /// Coordinate-format lines `row col value`, for the debug dump flag.
    pub fn to_coordinate_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for j in 0..self.n_cols {
            for (i, v) in self.col(j) {
                writeln!(out, "{i} {j} {v:.17e}").unwrap();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let mut t = Triplets::new(3, 3);
        t.push(0, 0, 1.0);
        t.push(2, 1, 4.0);
        t.push(0, 0, 2.0);
        t.push(1, 2, -1.0);
        let a = t.into_csc();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.col(0).collect::<Vec<_>>(), vec![(0, 3.0)]);
        assert_eq!(a.col(1).collect::<Vec<_>>(), vec![(2, 4.0)]);
        assert_eq!(a.col(2).collect::<Vec<_>>(), vec![(1, -1.0)]);
    }

    #[test]
    fn empty_trailing_columns() {
        let mut t = Triplets::new(4, 4);
        t.push(1, 1, 5.0);
        let a = t.into_csc();
        assert_eq!(a.colptr, vec![0, 0, 1, 1, 1]);
        let y = a.mul_vec(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(y, vec![0.0, 10.0, 0.0, 0.0]);
    }

    #[test]
    fn symmetric_upper_matvec_matches_dense() {
        let mut t = Triplets::new(3, 3);
        // Symmetric matrix [[2,1,0],[1,3,-1],[0,-1,4]] as upper triangle.
        for (i, j, v) in [(0, 0, 2.0), (0, 1, 1.0), (1, 1, 3.0), (1, 2, -1.0), (2, 2, 4.0)] {
            t.push(i, j, v);
        }
        let a = t.into_upper_csc();
        let y = a.sym_upper_mul_vec(&[1.0, 2.0, 3.0]);
        assert_eq!(y, vec![4.0, 4.0, 10.0]);
        let q = a.sym_upper_quadratic_form(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]);
        assert_eq!(q, 1.0 * 4.0 + 2.0 * 4.0 + 3.0 * 10.0);
    }
}
