//! One step of the fixed-point map: the Carleman-weighted quasi-reversibility
//! solve.
//!
//! Given a source `s(x)`, Dirichlet data `f` and Neumann data `g`, the step
//! minimizes the discrete quadratic
//!
//! ```text
//! q(φ) = dx dy Σ_nodes w (Lφ + s)²  +  penalty Σ_boundary (Bφ - g)²  +  ε ‖φ‖²_H²
//! ```
//!
//! over fields with `φ = f` on the boundary, where `L` is the discrete
//! `Div(A∇·)`, `B` the discrete normal flux and `‖φ‖²_H² = dx dy Σ (φ² + |∇φ|² + |D²φ|²)`
//! with the derivative terms taken at interior nodes. Dirichlet values are
//! eliminated, leaving the normal equations `Mφ = b` over interior nodes.

mod banded;
mod cg;
mod sparse;

pub use banded::BandedCholesky;
pub use sparse::CsrMatrix;

use crate::error::{Error, Result};
use crate::grid_fd::{self, DiffusionField, Grid, NodeKind, ScalarField, Stencil};
use crate::nonlinearity::{eval_f, NonlinearitySpec};
use crate::weight::{weight_field, CarlemanParams};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Band Cholesky of the normal equations.
    #[default]
    #[serde(alias = "sparse-direct-spd", alias = "direct")]
    SparseDirect,
    #[serde(alias = "cg")]
    ConjugateGradient,
}

impl std::str::FromStr for Backend {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "sparse-direct" | "sparse-direct-spd" | "direct" => Ok(Self::SparseDirect),
            "conjugate-gradient" | "cg" => Ok(Self::ConjugateGradient),
            other => Err(format!(
                "unknown backend {other:?} (expected sparse-direct or conjugate-gradient)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QrmConfig {
    pub epsilon: f64,
    pub bc_penalty: f64,
    pub solver: Backend,
    pub cg_tol: f64,
    /// Defaults to `10 n²` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cg_max_iter: Option<usize>,
}

impl Default for QrmConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            bc_penalty: 1e6,
            solver: Backend::SparseDirect,
            cg_tol: 1e-12,
            cg_max_iter: None,
        }
    }
}

impl QrmConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |field: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig {
                    field,
                    reason: format!("must be finite and positive, got {v}"),
                })
            }
        };
        positive("epsilon", self.epsilon)?;
        positive("bc_penalty", self.bc_penalty)?;
        positive("cg_tol", self.cg_tol)?;
        if self.cg_max_iter == Some(0) {
            return Err(Error::InvalidConfig {
                field: "cg_max_iter",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    fn cg_iterations(&self, grid: &Grid) -> usize {
        self.cg_max_iter.unwrap_or(10 * grid.len())
    }
}

/// Boundary data in [`Grid::boundary`] order: `u = f` and `A∇u·ν = g`.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl CauchyData {
    pub fn zeros(grid: &Grid) -> Self {
        let nb = grid.boundary().len();
        Self {
            f: vec![0.0; nb],
            g: vec![0.0; nb],
        }
    }

    pub fn check(&self, grid: &Grid) -> Result<()> {
        let nb = grid.boundary().len();
        for len in [self.f.len(), self.g.len()] {
            if len != nb {
                return Err(Error::DimensionMismatch {
                    expected: nb,
                    found: len,
                });
            }
        }
        Ok(())
    }
}

/// Map between grid nodes and the unknowns left after Dirichlet elimination.
#[derive(Debug)]
struct Layout {
    node_of_free: Vec<usize>,
}

impl Layout {
    fn new(grid: &Grid) -> Self {
        Self {
            node_of_free: (0..grid.len())
                .filter(|&k| grid.kind(k) == NodeKind::Interior)
                .collect(),
        }
    }

    fn scatter(&self, grid: &Grid, free: &[f64], dirichlet: &[f64]) -> ScalarField {
        let mut values = vec![0.0; grid.len()];
        for (&k, &v) in self.node_of_free.iter().zip(free) {
            values[k] = v;
        }
        for (b, &v) in grid.boundary().iter().zip(dirichlet) {
            values[b.index] = v;
        }
        ScalarField::from_vec_unchecked(values)
    }
}

/// Normal equations `M φ = b` over the interior unknowns.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: Arc<CsrMatrix>,
    pub rhs: Vec<f64>,
    grid: Grid,
    layout: Arc<Layout>,
    dirichlet: Vec<f64>,
}

impl LinearSystem {
    /// Embeds a solution of the reduced system back into a full field.
    pub fn to_field(&self, free: &[f64]) -> ScalarField {
        self.layout.scatter(&self.grid, free, &self.dirichlet)
    }

    pub fn unknowns(&self) -> usize {
        self.rhs.len()
    }
}

/// The data-independent part of the quadratic: its rows, weights and normal matrix.
#[derive(Debug)]
pub struct QrmOperator {
    grid: Grid,
    layout: Arc<Layout>,
    /// Every least-squares row restricted to interior columns.
    free_rows: CsrMatrix,
    /// Every least-squares row restricted to boundary columns (indexed by boundary slot).
    fixed_rows: CsrMatrix,
    weights: Vec<f64>,
    n_pde: usize,
    n_neumann: usize,
    normal: Arc<CsrMatrix>,
    cfg: QrmConfig,
}

impl QrmOperator {
    pub fn new(grid: &Grid, a: &DiffusionField, w: &ScalarField, cfg: &QrmConfig) -> Result<Self> {
        cfg.validate()?;
        grid.check_len(a.len())?;
        grid.check_len(w.len())?;
        let layout = Layout::new(grid);
        let mut free_of_node = vec![usize::MAX; grid.len()];
        for (u, &k) in layout.node_of_free.iter().enumerate() {
            free_of_node[k] = u;
        }

        let area = grid.cell_area();
        let mut stencils: Vec<Stencil> = Vec::with_capacity(8 * grid.len());
        let mut weights = Vec::with_capacity(8 * grid.len());

        for k in 0..grid.len() {
            stencils.push(grid_fd::stencil::div_a_grad_row(grid, a, k));
            weights.push(area * w[k]);
        }
        let n_pde = stencils.len();
        for slot in 0..grid.boundary().len() {
            stencils.push(grid_fd::stencil::normal_flux_row(grid, a, slot));
            weights.push(cfg.bc_penalty);
        }
        let n_neumann = stencils.len() - n_pde;

        let reg = cfg.epsilon * area;
        for k in 0..grid.len() {
            let mut s = grid_fd::StencilBuilder::new();
            s.add(k, 1.0);
            stencils.push(s.build());
            weights.push(reg);
        }
        for &k in &layout.node_of_free {
            use grid_fd::stencil::{d_x, d_xx, d_xy, d_y, d_yy};
            for (row, scale) in [
                (d_x(grid, k), 1.0),
                (d_y(grid, k), 1.0),
                (d_xx(grid, k), 1.0),
                (d_yy(grid, k), 1.0),
                (d_xy(grid, k), 2.0),
            ] {
                stencils.push(row);
                weights.push(scale * reg);
            }
        }

        let split = |want_free: bool| {
            CsrMatrix::from_rows(
                if want_free {
                    layout.node_of_free.len()
                } else {
                    grid.boundary().len()
                },
                stencils.iter().map(|s| {
                    let mut row: Vec<(usize, f64)> = s
                        .entries()
                        .iter()
                        .filter_map(|&(k, c)| match (grid.kind(k), want_free) {
                            (NodeKind::Interior, true) => Some((free_of_node[k], c)),
                            (NodeKind::Boundary(slot), false) => Some((slot, c)),
                            _ => None,
                        })
                        .collect();
                    row.sort_by_key(|e| e.0);
                    row
                }),
            )
        };
        let free_rows = split(true);
        let fixed_rows = split(false);
        let normal = Arc::new(free_rows.weighted_gram(&weights));

        Ok(Self {
            grid: grid.clone(),
            layout: Arc::new(layout),
            free_rows,
            fixed_rows,
            weights,
            n_pde,
            n_neumann,
            normal,
            cfg: *cfg,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn config(&self) -> &QrmConfig {
        &self.cfg
    }

    pub fn normal_matrix(&self) -> &CsrMatrix {
        &self.normal
    }

    pub fn unknowns(&self) -> usize {
        self.layout.node_of_free.len()
    }

    /// Per-row targets with the Dirichlet contribution moved to the right.
    fn reduced_targets(&self, source: &ScalarField, data: &CauchyData) -> Vec<f64> {
        let mut t = vec![0.0; self.weights.len()];
        for (k, tk) in t[..self.n_pde].iter_mut().enumerate() {
            *tk = -source[k];
        }
        t[self.n_pde..self.n_pde + self.n_neumann].copy_from_slice(&data.g);
        let mut fixed = vec![0.0; self.weights.len()];
        self.fixed_rows.matvec(&data.f, &mut fixed);
        for (tk, fk) in t.iter_mut().zip(&fixed) {
            *tk -= fk;
        }
        t
    }

    pub fn system(&self, source: &ScalarField, data: &CauchyData) -> Result<LinearSystem> {
        self.grid.check_len(source.len())?;
        data.check(&self.grid)?;
        let mut t = self.reduced_targets(source, data);
        for (tk, wk) in t.iter_mut().zip(&self.weights) {
            *tk *= wk;
        }
        let mut rhs = vec![0.0; self.unknowns()];
        self.free_rows.matvec_transpose(&t, &mut rhs);
        Ok(LinearSystem {
            matrix: Arc::clone(&self.normal),
            rhs,
            grid: self.grid.clone(),
            layout: Arc::clone(&self.layout),
            dirichlet: data.f.clone(),
        })
    }

    /// Value of the quadratic `q(φ)` at a full field `φ` (boundary values included).
    pub fn objective(&self, phi: &ScalarField, source: &ScalarField, data: &CauchyData) -> Result<f64> {
        self.grid.check_len(phi.len())?;
        let parts = self.objective_parts(phi, source, data)?;
        Ok(parts.iter().sum())
    }

    /// `q(φ)` split into (weighted residual, Neumann penalty, regularization).
    pub fn objective_parts(&self, phi: &ScalarField, source: &ScalarField, data: &CauchyData) -> Result<[f64; 3]> {
        self.grid.check_len(phi.len())?;
        self.grid.check_len(source.len())?;
        data.check(&self.grid)?;
        let boundary = phi.boundary_values(&self.grid);
        let mut row_fixed = vec![0.0; self.weights.len()];
        self.fixed_rows.matvec(&boundary, &mut row_fixed);
        let free: Vec<f64> = self.layout.node_of_free.iter().map(|&k| phi[k]).collect();
        let mut row_free = vec![0.0; self.weights.len()];
        self.free_rows.matvec(&free, &mut row_free);

        let mut parts = [0.0; 3];
        for r in 0..self.weights.len() {
            let value = row_fixed[r] + row_free[r];
            let (part, target) = if r < self.n_pde {
                (0, -source[r])
            } else if r < self.n_pde + self.n_neumann {
                (1, data.g[r - self.n_pde])
            } else {
                (2, 0.0)
            };
            parts[part] += self.weights[r] * (value - target).powi(2);
        }
        Ok(parts)
    }
}

enum Factor {
    Direct(BandedCholesky),
    Iterative { tol: f64, max_iter: usize },
}

/// A [`QrmOperator`] with its normal matrix factored once for repeated solves.
pub struct QrmSolver {
    op: QrmOperator,
    factor: Factor,
}

impl QrmSolver {
    pub fn new(op: QrmOperator) -> Result<Self> {
        let factor = make_factor(&op.normal, &op.cfg, &op.grid)?;
        Ok(Self { op, factor })
    }

    pub fn build(grid: &Grid, a: &DiffusionField, w: &ScalarField, cfg: &QrmConfig) -> Result<Self> {
        Self::new(QrmOperator::new(grid, a, w, cfg)?)
    }

    pub fn operator(&self) -> &QrmOperator {
        &self.op
    }

    /// Minimizer of `q` for the given source and Cauchy data.
    pub fn solve(&self, source: &ScalarField, data: &CauchyData) -> Result<ScalarField> {
        let system = self.op.system(source, data)?;
        let free = run_factor(&self.factor, &system)?;
        Ok(system.to_field(&free))
    }

    /// `Φ(u)`: evaluates `F(x, u, ∇u)` on the current iterate and solves.
    pub fn phi_step(&self, spec: &NonlinearitySpec, data: &CauchyData, u_current: &ScalarField) -> Result<ScalarField> {
        let source = evaluate_source(&self.op.grid, spec, u_current)?;
        self.solve(&source, data)
    }
}

fn make_factor(m: &CsrMatrix, cfg: &QrmConfig, grid: &Grid) -> Result<Factor> {
    Ok(match cfg.solver {
        Backend::SparseDirect => Factor::Direct(BandedCholesky::factor(m)?),
        Backend::ConjugateGradient => Factor::Iterative {
            tol: cfg.cg_tol,
            max_iter: cfg.cg_iterations(grid),
        },
    })
}

fn run_factor(factor: &Factor, system: &LinearSystem) -> Result<Vec<f64>> {
    match factor {
        Factor::Direct(chol) => Ok(chol.solve(&system.rhs)),
        Factor::Iterative { tol, max_iter } => cg::solve(&system.matrix, &system.rhs, *tol, *max_iter),
    }
}

/// `F_M(x, u(x), ∇u(x))` at every node, with `∇u` from the grid stencils.
pub fn evaluate_source(grid: &Grid, spec: &NonlinearitySpec, u: &ScalarField) -> Result<ScalarField> {
    let (gx, gy) = grid_fd::gradient(grid, u)?;
    let values = (0..grid.len())
        .map(|k| eval_f(spec, grid.point(k), u[k], [gx[k], gy[k]]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalarField::from_vec_unchecked(values))
}

/// Builds the normal equations for one quasi-reversibility solve.
pub fn assemble(
    grid: &Grid,
    a: &DiffusionField,
    w: &ScalarField,
    source: &ScalarField,
    data: &CauchyData,
    cfg: &QrmConfig,
) -> Result<LinearSystem> {
    QrmOperator::new(grid, a, w, cfg)?.system(source, data)
}

/// Solves an assembled system and re-inserts the Dirichlet values.
pub fn solve_qrm(system: &LinearSystem, cfg: &QrmConfig) -> Result<ScalarField> {
    cfg.validate()?;
    let factor = make_factor(&system.matrix, cfg, &system.grid)?;
    let free = run_factor(&factor, system)?;
    Ok(system.to_field(&free))
}

/// One application of `Φ` from scratch. Repeated steps on the same problem
/// should reuse a [`QrmSolver`] instead.
#[allow(clippy::too_many_arguments)]
pub fn phi_step(
    grid: &Grid,
    a: &DiffusionField,
    params: &CarlemanParams,
    spec: &NonlinearitySpec,
    data: &CauchyData,
    cfg: &QrmConfig,
    u_current: &ScalarField,
) -> Result<ScalarField> {
    let w = weight_field(params, grid)?;
    QrmSolver::build(grid, a, &w, cfg)?.phi_step(spec, data, u_current)
}
