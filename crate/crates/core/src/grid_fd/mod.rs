//! Uniform tensor grid on a rectangle and the finite-difference operators
//! acting on nodal fields.
//!
//! Nodes are numbered lexicographically with `i` (the x index) running
//! fastest: `k = j * n + i`. Interior stencils are second-order centered;
//! nodes on the boundary use second-order one-sided differences in the
//! direction normal to the edge they lie on.

mod ops;
pub mod stencil;

pub use ops::{div_a_grad, gradient, hessian, l2_norm, normal_flux};
pub use stencil::{Stencil, StencilBuilder};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    /// Position in [`Grid::boundary`].
    Boundary(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub index: usize,
    /// Outward unit normal. Corners carry `(±1, ±1) / √2`.
    pub normal: [f64; 2],
}

/// Rectangle `[xmin, xmax] × [ymin, ymax]` with `n` nodes per axis.
#[derive(Debug, Clone)]
pub struct Grid {
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
    n: usize,
    dx: f64,
    dy: f64,
    kinds: Vec<NodeKind>,
    boundary: Vec<BoundaryNode>,
}

/// Serializable description of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub n: usize,
}

impl Grid {
    pub const MIN_NODES: usize = 5;

    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, n: usize) -> Result<Self> {
        if n < Self::MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "need at least {} nodes per axis, got {n}",
                Self::MIN_NODES
            )));
        }
        if !(xmin.is_finite() && xmax.is_finite() && ymin.is_finite() && ymax.is_finite()) {
            return Err(Error::InvalidGrid("non-finite domain corner".into()));
        }
        if xmax <= xmin || ymax <= ymin {
            return Err(Error::InvalidGrid(format!(
                "empty rectangle [{xmin}, {xmax}] x [{ymin}, {ymax}]"
            )));
        }
        let dx = (xmax - xmin) / (n - 1) as f64;
        let dy = (ymax - ymin) / (n - 1) as f64;

        let mut kinds = Vec::with_capacity(n * n);
        let mut boundary = Vec::with_capacity(4 * (n - 1));
        let last = n - 1;
        for j in 0..n {
            for i in 0..n {
                let nx = if i == 0 {
                    -1.0
                } else if i == last {
                    1.0
                } else {
                    0.0
                };
                let ny = if j == 0 {
                    -1.0
                } else if j == last {
                    1.0
                } else {
                    0.0
                };
                if nx == 0.0 && ny == 0.0 {
                    kinds.push(NodeKind::Interior);
                } else {
                    let len = f64::hypot(nx, ny);
                    kinds.push(NodeKind::Boundary(boundary.len()));
                    boundary.push(BoundaryNode {
                        index: j * n + i,
                        normal: [nx / len, ny / len],
                    });
                }
            }
        }
        Ok(Self {
            xmin,
            xmax,
            ymin,
            ymax,
            n,
            dx,
            dy,
            kinds,
            boundary,
        })
    }

    /// The square `(-1, 1)²` used by all bundled test problems.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(-1.0, 1.0, -1.0, 1.0, n)
    }

    pub fn from_spec(spec: &GridSpec) -> Result<Self> {
        Self::new(spec.xmin, spec.xmax, spec.ymin, spec.ymax, spec.n)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            xmin: self.xmin,
            xmax: self.xmax,
            ymin: self.ymin,
            ymax: self.ymax,
            n: self.n,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    /// Quadrature weight of a single node.
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        ([self.xmin, self.xmax], [self.ymin, self.ymax])
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.n, k / self.n)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.xmin + i as f64 * self.dx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.ymin + j as f64 * self.dy
    }

    #[inline]
    pub fn point(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.ij(k);
        [self.x(i), self.y(j)]
    }

    pub fn kind(&self, k: usize) -> NodeKind {
        self.kinds[k]
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        matches!(self.kinds[k], NodeKind::Boundary(_))
    }

    pub fn boundary(&self) -> &[BoundaryNode] {
        &self.boundary
    }

    pub fn interior_count(&self) -> usize {
        (self.n - 2) * (self.n - 2)
    }

    /// Whether the closed rectangle contains `p`.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.xmin && p[0] <= self.xmax && p[1] >= self.ymin && p[1] <= self.ymax
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: len,
            });
        }
        Ok(())
    }
}

/// Real values on the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        grid.check_len(values.len())?;
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField { index });
        }
        Ok(Self { values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        Self {
            values: vec![value; grid.len()],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                let [x, y] = grid.point(k);
                f(x, y)
            })
            .collect();
        Self { values }
    }

    /// Wraps values without the finiteness scan; used for operator outputs.
    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        debug_assert_eq!(self.len(), other.len());
        Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    /// `self * alpha + other * beta`.
    pub fn combine(&self, alpha: f64, other: &ScalarField, beta: f64) -> ScalarField {
        debug_assert_eq!(self.len(), other.len());
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        }
    }

    pub fn scale(&self, alpha: f64) -> ScalarField {
        Self {
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    pub fn abs(&self) -> ScalarField {
        Self {
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    /// Values at the boundary nodes, in [`Grid::boundary`] order.
    pub fn boundary_values(&self, grid: &Grid) -> Vec<f64> {
        grid.boundary().iter().map(|b| self.values[b.index]).collect()
    }
}

impl std::ops::Index<usize> for ScalarField {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.values[k]
    }
}

/// Symmetric 2×2 tensor stored as its three distinct entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTensor {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl SymTensor {
    pub const IDENTITY: SymTensor = SymTensor {
        a11: 1.0,
        a12: 0.0,
        a22: 1.0,
    };

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a11 * v[0] + self.a12 * v[1], self.a12 * v[0] + self.a22 * v[1]]
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.a11 + self.a22);
        let rad = f64::hypot(0.5 * (self.a11 - self.a22), self.a12);
        (mean - rad, mean + rad)
    }
}

/// Per-node diffusion tensor `A(x)`, uniformly elliptic with constant `Λ`.
#[derive(Debug, Clone)]
pub struct DiffusionField {
    tensors: Vec<SymTensor>,
    ellipticity: f64,
    identity: bool,
}

impl DiffusionField {
    pub fn identity(grid: &Grid) -> Self {
        Self {
            tensors: vec![SymTensor::IDENTITY; grid.len()],
            ellipticity: 1.0,
            identity: true,
        }
    }

    /// Checks `Λ ≤ eig(A(x)) ≤ 1/Λ` at every node.
    pub fn new(grid: &Grid, tensors: Vec<SymTensor>, ellipticity: f64) -> Result<Self> {
        grid.check_len(tensors.len())?;
        if !(ellipticity > 0.0 && ellipticity <= 1.0) {
            return Err(Error::InvalidConfig {
                field: "ellipticity",
                reason: format!("must lie in (0, 1], got {ellipticity}"),
            });
        }
        for (k, t) in tensors.iter().enumerate() {
            let (lo, hi) = t.eigenvalues();
            if !(lo >= ellipticity && hi <= 1.0 / ellipticity) {
                let [x, y] = grid.point(k);
                return Err(Error::NotElliptic {
                    x,
                    y,
                    bound: ellipticity,
                    min_eig: lo,
                    max_eig: hi,
                });
            }
        }
        let identity = tensors.iter().all(|t| *t == SymTensor::IDENTITY);
        Ok(Self {
            tensors,
            ellipticity,
            identity,
        })
    }

    pub fn from_fn(grid: &Grid, ellipticity: f64, f: impl Fn(f64, f64) -> SymTensor) -> Result<Self> {
        let tensors = (0..grid.len())
            .map(|k| {
                let [x, y] = grid.point(k);
                f(x, y)
            })
            .collect();
        Self::new(grid, tensors, ellipticity)
    }

    pub fn at(&self, k: usize) -> SymTensor {
        self.tensors[k]
    }

    pub fn tensors(&self) -> &[SymTensor] {
        &self.tensors
    }

    pub fn ellipticity(&self) -> f64 {
        self.ellipticity
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }
}
