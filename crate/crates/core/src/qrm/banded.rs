//! Band Cholesky factorization for SPD matrices whose nonzeros stay within a
//! fixed distance of the diagonal. Finite-difference normal equations in
//! lexicographic ordering have half-bandwidth of a few grid lines, so the
//! factor fits the band exactly with no fill outside it.

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    /// Row `i` holds `L[i][i - bw ..= i]` (entries left of column 0 are unused).
    band: Vec<f64>,
}

impl BandedCholesky {
    pub fn factor(m: &CsrMatrix) -> Result<Self> {
        assert_eq!(m.nrows(), m.ncols(), "band Cholesky needs a square matrix");
        let n = m.nrows();
        let bw = m.half_bandwidth();
        let stride = bw + 1;
        let mut band = vec![0.0; n * stride];

        for i in 0..n {
            let (idx, val) = m.row(i);
            for (&c, &v) in idx.iter().zip(val) {
                if c <= i {
                    band[i * stride + (c + bw - i)] = v;
                }
            }
        }

        for i in 0..n {
            let first = i.saturating_sub(bw);
            for j in first..=i {
                // columns k with first ≤ k < j are in the band of both rows
                let k0 = first.max(j.saturating_sub(bw));
                let len = j - k0;
                let ri = i * stride + (k0 + bw - i);
                let rj = j * stride + (k0 + bw - j);
                let dot = dot(&band[ri..ri + len], &band[rj..rj + len]);
                let pos = i * stride + (j + bw - i);
                let s = band[pos] - dot;
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::Factorization { pivot: i, value: s });
                    }
                    band[pos] = s.sqrt();
                } else {
                    band[pos] = s / band[j * stride + bw];
                }
            }
        }
        Ok(Self { n, bw, band })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.bw
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let stride = self.bw + 1;
        let mut y = b.to_vec();
        // L y = b
        for i in 0..self.n {
            let first = i.saturating_sub(self.bw);
            let row = &self.band[i * stride + (first + self.bw - i)..i * stride + self.bw];
            let s = dot(row, &y[first..i]);
            y[i] = (y[i] - s) / self.band[i * stride + self.bw];
        }
        // Lᵀ x = y
        for i in (0..self.n).rev() {
            y[i] /= self.band[i * stride + self.bw];
            let xi = y[i];
            let first = i.saturating_sub(self.bw);
            let row = &self.band[i * stride + (first + self.bw - i)..i * stride + self.bw];
            for (yk, &l) in y[first..i].iter_mut().zip(row) {
                *yk -= l * xi;
            }
        }
        y
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators let the compiler vectorize without reassociating a single sum
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for l in 0..4 {
            acc[l] += a[4 * c + l] * b[4 * c + l];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for t in 4 * chunks..a.len() {
        s += a[t] * b[t];
    }
    s
}
