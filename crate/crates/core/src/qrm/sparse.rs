//! Compressed sparse row storage and the few kernels the solver needs.

/// CSR matrix with sorted, duplicate-free column indices in each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row entry lists. Entries within a row must be sorted by
    /// column and unique.
    pub fn from_rows<I, R>(ncols: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = (usize, f64)>,
    {
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for row in rows {
            let start = indices.len();
            for (c, v) in row {
                debug_assert!(c < ncols);
                debug_assert!(indices.len() == start || *indices.last().unwrap() < c);
                indices.push(c);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        Self {
            nrows: indptr.len() - 1,
            ncols,
            indptr,
            indices,
            values,
        }
    }

    /// Sums duplicate entries.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nrows];
        for (r, c, v) in sorted {
            let row = &mut rows[r];
            match row.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => row.push((c, v)),
            }
        }
        Self::from_rows(ncols, rows)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.indptr[r]..self.indptr[r + 1];
        (&self.indices[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (idx, val) = self.row(r);
        match idx.binary_search(&c) {
            Ok(p) => val[p],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (r, out) in y.iter_mut().enumerate() {
            let (idx, val) = self.row(r);
            *out = idx.iter().zip(val).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    /// `Aᵀ x`.
    pub fn matvec_transpose(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.nrows);
        debug_assert_eq!(y.len(), self.ncols);
        y.iter_mut().for_each(|v| *v = 0.0);
        for (r, &xr) in x.iter().enumerate() {
            if xr == 0.0 {
                continue;
            }
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                y[c] += v * xr;
            }
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|r| self.get(r, r)).collect()
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.indices {
            counts[c + 1] += 1;
        }
        for c in 0..self.ncols {
            counts[c + 1] += counts[c];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut indices = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for r in 0..self.nrows {
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                let p = next[c];
                indices[p] = r;
                values[p] = v;
                next[c] += 1;
            }
        }
        CsrMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            indptr,
            indices,
            values,
        }
    }

    /// Weighted Gram matrix `Aᵀ diag(w) A` (Gustavson row-by-row product).
    pub fn weighted_gram(&self, weights: &[f64]) -> CsrMatrix {
        debug_assert_eq!(weights.len(), self.nrows);
        let at = self.transpose();
        let n = self.ncols;
        let mut acc = vec![0.0; n];
        let mut seen = vec![usize::MAX; n];
        let mut cols: Vec<usize> = Vec::new();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            cols.clear();
            let (ridx, rval) = at.row(i);
            for (&r, &a_ri) in ridx.iter().zip(rval) {
                let w = weights[r];
                let (cidx, cval) = self.row(r);
                for (&j, &a_rj) in cidx.iter().zip(cval) {
                    if seen[j] != i {
                        seen[j] = i;
                        acc[j] = 0.0;
                        cols.push(j);
                    }
                    // w·(a_ri·a_rj) keeps the product bitwise symmetric in (i, j)
                    acc[j] += w * (a_ri * a_rj);
                }
            }
            cols.sort_unstable();
            rows.push(cols.iter().map(|&j| (j, acc[j])).collect::<Vec<_>>());
        }
        CsrMatrix::from_rows(n, rows)
    }

    /// Largest `|i - j|` over stored entries.
    pub fn half_bandwidth(&self) -> usize {
        (0..self.nrows)
            .flat_map(|r| self.row(r).0.iter().map(move |&c| r.abs_diff(c)))
            .max()
            .unwrap_or(0)
    }

    /// `max |A - Aᵀ|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.nrows {
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }

    /// Same pattern, values multiplied by `s`.
    pub fn scaled(&self, s: f64) -> CsrMatrix {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= s);
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (r, row) in d.iter_mut().enumerate() {
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                row[c] = v;
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CsrMatrix {
        // [[1, 0, 2], [0, 3, 0], [4, 0, 5], [0, 6, 7]]
        CsrMatrix::from_triplets(
            4,
            3,
            &[
                (0, 0, 1.0),
                (0, 2, 2.0),
                (1, 1, 3.0),
                (2, 0, 4.0),
                (2, 2, 2.5),
                (2, 2, 2.5),
                (3, 1, 6.0),
                (3, 2, 7.0),
            ],
        )
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = sample();
        assert_eq!(a.nnz(), 7);
        assert_eq!(a.get(2, 2), 5.0);
        assert_eq!(a.get(1, 0), 0.0);
    }

    #[test]
    fn matvec_and_transpose_agree_with_dense() {
        let a = sample();
        let x = [1.0, -2.0, 0.5];
        let mut y = [0.0; 4];
        a.matvec(&x, &mut y);
        assert_eq!(y, [2.0, -6.0, 6.5, -8.5]);
        let mut z = [0.0; 3];
        a.matvec_transpose(&[1.0, 1.0, 1.0, 1.0], &mut z);
        assert_eq!(z, [5.0, 9.0, 14.0]);
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn weighted_gram_matches_dense_product() {
        let a = sample();
        let w = [1.0, 2.0, 0.5, 3.0];
        let g = a.weighted_gram(&w);
        let d = a.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                let expect: f64 = (0..4).map(|r| w[r] * d[r][i] * d[r][j]).sum();
                assert!((g.get(i, j) - expect).abs() < 1e-12);
            }
        }
        assert_eq!(g.max_asymmetry(), 0.0);
        assert_eq!(g.half_bandwidth(), 2);
    }
}
