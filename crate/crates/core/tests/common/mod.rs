//! Dense brute-force reference for the quasi-reversibility step with `A = I`.
//!
//! Everything here is written from the finite-difference formulas directly and
//! shares no assembly code with the library: nodes are `k = j n + i`, rows are
//! dense vectors over all nodes, and the normal equations are formed as
//! `Σ w_r a_r a_rᵀ` before the boundary columns are moved to the right.

#![allow(dead_code)]

use carleman::grid_fd::{Grid, ScalarField};
use carleman::nonlinearity::{eval_f, NonlinearitySpec};
use carleman::qrm::CauchyData;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

pub struct DenseOracle {
    pub n: usize,
    pub h: f64,
    pub weight: Vec<f64>,
    pub epsilon: f64,
    pub penalty: f64,
    /// Node index and outward unit normal, in the grid's boundary order.
    pub boundary: Vec<(usize, [f64; 2])>,
}

fn first_taps(i: usize, n: usize, h: f64) -> Vec<(usize, f64)> {
    let s = 1.0 / (2.0 * h);
    if i == 0 {
        vec![(0, -3.0 * s), (1, 4.0 * s), (2, -s)]
    } else if i == n - 1 {
        vec![(n - 1, 3.0 * s), (n - 2, -4.0 * s), (n - 3, s)]
    } else {
        vec![(i - 1, -s), (i + 1, s)]
    }
}

fn second_taps(i: usize, n: usize, h: f64) -> Vec<(usize, f64)> {
    let s = 1.0 / (h * h);
    if i == 0 {
        vec![(0, 2.0 * s), (1, -5.0 * s), (2, 4.0 * s), (3, -s)]
    } else if i == n - 1 {
        vec![(n - 1, 2.0 * s), (n - 2, -5.0 * s), (n - 3, 4.0 * s), (n - 4, -s)]
    } else {
        vec![(i - 1, s), (i, -2.0 * s), (i + 1, s)]
    }
}

impl DenseOracle {
    pub fn new(grid: &Grid, epsilon: f64, penalty: f64) -> Self {
        let n = grid.n();
        let h = 2.0 / (n as f64 - 1.0);
        let node = |i: usize| -1.0 + i as f64 * h;
        let mut weight = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let r = (node(i).powi(2) + (node(j) - 9.0).powi(2)).sqrt();
                weight.push((2.0 * 3.0 * r.powf(-10.0)).exp());
            }
        }
        let boundary = grid
            .boundary()
            .iter()
            .map(|b| {
                let (i, j) = (b.index % n, b.index / n);
                let nx = if i == 0 {
                    -1.0
                } else if i == n - 1 {
                    1.0
                } else {
                    0.0
                };
                let ny = if j == 0 {
                    -1.0
                } else if j == n - 1 {
                    1.0
                } else {
                    0.0
                };
                let len = f64::hypot(nx, ny);
                (b.index, [nx / len, ny / len])
            })
            .collect();
        Self {
            n,
            h,
            weight,
            epsilon,
            penalty,
            boundary,
        }
    }

    fn nodes(&self) -> usize {
        self.n * self.n
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        let (i, j) = (k % self.n, k / self.n);
        i == 0 || j == 0 || i == self.n - 1 || j == self.n - 1
    }

    fn row_x(&self, k: usize, taps: &[(usize, f64)]) -> DVector<f64> {
        let j = k / self.n;
        let mut r = DVector::zeros(self.nodes());
        for &(i, c) in taps {
            r[j * self.n + i] += c;
        }
        r
    }

    fn row_y(&self, k: usize, taps: &[(usize, f64)]) -> DVector<f64> {
        let i = k % self.n;
        let mut r = DVector::zeros(self.nodes());
        for &(j, c) in taps {
            r[j * self.n + i] += c;
        }
        r
    }

    pub fn dx(&self, k: usize) -> DVector<f64> {
        self.row_x(k, &first_taps(k % self.n, self.n, self.h))
    }

    pub fn dy(&self, k: usize) -> DVector<f64> {
        self.row_y(k, &first_taps(k / self.n, self.n, self.h))
    }

    pub fn dxx(&self, k: usize) -> DVector<f64> {
        self.row_x(k, &second_taps(k % self.n, self.n, self.h))
    }

    pub fn dyy(&self, k: usize) -> DVector<f64> {
        self.row_y(k, &second_taps(k / self.n, self.n, self.h))
    }

    pub fn dxy(&self, k: usize) -> DVector<f64> {
        let (i, j) = (k % self.n, k / self.n);
        let mut r = DVector::zeros(self.nodes());
        for (jj, cy) in first_taps(j, self.n, self.h) {
            for &(ii, cx) in &first_taps(i, self.n, self.h) {
                r[jj * self.n + ii] += cx * cy;
            }
        }
        r
    }

    pub fn laplacian(&self, k: usize) -> DVector<f64> {
        self.dxx(k) + self.dyy(k)
    }

    /// Every least-squares row with its weight and its row tag.
    fn rows(&self) -> Vec<(DVector<f64>, f64, RowKind)> {
        let area = self.h * self.h;
        let reg = self.epsilon * area;
        let mut out = Vec::new();
        for k in 0..self.nodes() {
            out.push((self.laplacian(k), area * self.weight[k], RowKind::Pde(k)));
        }
        for (slot, &(k, nu)) in self.boundary.iter().enumerate() {
            out.push((
                self.dx(k) * nu[0] + self.dy(k) * nu[1],
                self.penalty,
                RowKind::Neumann(slot),
            ));
        }
        for k in 0..self.nodes() {
            let mut e = DVector::zeros(self.nodes());
            e[k] = 1.0;
            out.push((e, reg, RowKind::Zero));
        }
        for k in (0..self.nodes()).filter(|&k| !self.is_boundary(k)) {
            out.push((self.dx(k), reg, RowKind::Zero));
            out.push((self.dy(k), reg, RowKind::Zero));
            out.push((self.dxx(k), reg, RowKind::Zero));
            out.push((self.dyy(k), reg, RowKind::Zero));
            out.push((self.dxy(k), 2.0 * reg, RowKind::Zero));
        }
        out
    }

    /// Full (all-node) Hessian `Σ w a aᵀ` and linear term `Σ w t a`.
    pub fn full_normal_equations(&self, source: &[f64], g: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
        let nn = self.nodes();
        let mut h = DMatrix::zeros(nn, nn);
        let mut r = DVector::zeros(nn);
        for (a, w, kind) in self.rows() {
            let target = match kind {
                RowKind::Pde(k) => -source[k],
                RowKind::Neumann(slot) => g[slot],
                RowKind::Zero => 0.0,
            };
            h.ger(w, &a, &a, 1.0);
            r.axpy(w * target, &a, 1.0);
        }
        (h, r)
    }

    pub fn interior(&self) -> Vec<usize> {
        (0..self.nodes()).filter(|&k| !self.is_boundary(k)).collect()
    }

    /// Reduced matrix over interior nodes, in increasing node order.
    pub fn reduced_matrix(&self) -> DMatrix<f64> {
        let (h, _) = self.full_normal_equations(&vec![0.0; self.nodes()], &vec![0.0; self.boundary.len()]);
        let free = self.interior();
        DMatrix::from_fn(free.len(), free.len(), |a, b| h[(free[a], free[b])])
    }

    /// Minimizer of the quadratic with the Dirichlet values fixed.
    pub fn solve(&self, source: &[f64], data: &CauchyData) -> Vec<f64> {
        let (h, r) = self.full_normal_equations(source, &data.g);
        let mut fixed = vec![0.0; self.nodes()];
        for (&(k, _), &v) in self.boundary.iter().zip(&data.f) {
            fixed[k] = v;
        }
        let free = self.interior();
        let m = DMatrix::from_fn(free.len(), free.len(), |a, b| h[(free[a], free[b])]);
        let b = DVector::from_fn(free.len(), |a, _| {
            let k = free[a];
            r[k] - (0..self.nodes()).map(|c| h[(k, c)] * fixed[c]).sum::<f64>()
        });
        let x = m.cholesky().expect("oracle normal matrix is SPD").solve(&b);
        let mut out = fixed;
        for (a, &k) in free.iter().enumerate() {
            out[k] = x[a];
        }
        out
    }

    /// `F(x, u, ∇u)` with the oracle's own gradient.
    pub fn source(&self, spec: &NonlinearitySpec, u: &[f64]) -> Vec<f64> {
        let u = DVector::from_column_slice(u);
        (0..self.nodes())
            .map(|k| {
                let x = [-1.0 + (k % self.n) as f64 * self.h, -1.0 + (k / self.n) as f64 * self.h];
                let p = [self.dx(k).dot(&u), self.dy(k).dot(&u)];
                eval_f(spec, x, u[k], p).unwrap()
            })
            .collect()
    }

    /// One fixed-point step `Φ(u)`.
    pub fn phi(&self, spec: &NonlinearitySpec, data: &CauchyData, u: &[f64]) -> Vec<f64> {
        self.solve(&self.source(spec, u), data)
    }
}

#[derive(Clone, Copy)]
enum RowKind {
    Pde(usize),
    Neumann(usize),
    Zero,
}

pub fn rel_linf(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    diff / scale
}

pub fn field(u: &ScalarField) -> Vec<f64> {
    u.values().to_vec()
}

/// Exact solutions of the bundled tests with derivatives worked out by hand.
pub struct Derivatives {
    pub u: f64,
    pub grad: [f64; 2],
    pub laplacian: f64,
}

pub fn by_hand(test: usize, x: f64, y: f64) -> Derivatives {
    match test {
        1 => {
            let t = PI * (x + y);
            Derivatives {
                u: t.sin(),
                grad: [PI * t.cos(), PI * t.cos()],
                laplacian: -2.0 * PI * PI * t.sin(),
            }
        }
        2 => Derivatives {
            u: x * x - 2.0 * y * y,
            grad: [2.0 * x, -4.0 * y],
            laplacian: 2.0 - 4.0,
        },
        3 => {
            let r = PI * (x * x + y * y);
            let uxx = 2.0 * PI * r.cos() - 4.0 * PI * PI * x * x * r.sin();
            let uyy = 2.0 * PI * r.cos() - 4.0 * PI * PI * y * y * r.sin();
            Derivatives {
                u: r.sin(),
                grad: [2.0 * PI * x * r.cos(), 2.0 * PI * y * r.cos()],
                laplacian: uxx + uyy,
            }
        }
        4 => {
            let t = 4.0 * PI * x - 2.0 * PI * y * y;
            let uxx = -16.0 * PI * PI * t.sin();
            let uyy = -4.0 * PI * t.cos() - 16.0 * PI * PI * y * y * t.sin();
            Derivatives {
                u: t.sin() + y,
                grad: [4.0 * PI * t.cos(), -4.0 * PI * y * t.cos() + 1.0],
                laplacian: uxx + uyy,
            }
        }
        _ => unreachable!(),
    }
}
