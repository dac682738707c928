use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Jacobi-preconditioned conjugate gradients. Stops when `‖b - Mx‖ ≤ tol ‖b‖`.
pub fn solve(m: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = b.len();
    let inv_diag: Vec<f64> = m
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let b_norm = norm(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);

    for it in 0..max_iter {
        m.matvec(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return Err(Error::CgNotConverged {
                iterations: it,
                residual: norm(&r) / b_norm,
            });
        }
        let alpha = rz / pq;
        for t in 0..n {
            x[t] += alpha * p[t];
            r[t] -= alpha * q[t];
        }
        if norm(&r) <= tol * b_norm {
            return Ok(x);
        }
        for t in 0..n {
            z[t] = r[t] * inv_diag[t];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for t in 0..n {
            p[t] = z[t] + beta * p[t];
        }
    }
    Err(Error::CgNotConverged {
        iterations: max_iter,
        residual: norm(&r) / b_norm,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_on_poisson_1d() {
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
                t.push((i - 1, i, -1.0));
            }
        }
        let m = CsrMatrix::from_triplets(n, n, &t);
        let b = vec![1.0; n];
        let x = solve(&m, &b, 1e-12, 500).unwrap();
        let mut r = vec![0.0; n];
        m.matvec(&x, &mut r);
        let res: f64 = r.iter().zip(&b).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
        assert!(res <= 1e-12 * (n as f64).sqrt());
    }

    #[test]
    fn reports_non_convergence() {
        let m = CsrMatrix::from_triplets(
            3,
            3,
            &[(0, 0, 1.0), (1, 1, 100.0), (2, 2, 1e4), (0, 2, 0.5), (2, 0, 0.5)],
        );
        let err = solve(&m, &[1.0, 1.0, 1.0], 1e-15, 1).unwrap_err();
        assert!(matches!(err, Error::CgNotConverged { iterations: 1, .. }));
    }
}
