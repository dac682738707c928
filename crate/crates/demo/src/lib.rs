//! Browser bindings: solve a bundled problem on a small grid, inspect its
//! iteration trace, and plot the Carleman weight for custom parameters.
//!
//! Every export has a plain-Rust counterpart returning [`carleman::Result`],
//! which is what the native tests exercise.

use carleman::driver::{DriverConfig, FixedPointSolver};
use carleman::grid_fd::{DiffusionField, Grid};
use carleman::problems::{error_report, make_problem, sample_cauchy_data, NoiseModel, ProblemId};
use carleman::qrm::QrmConfig;
use carleman::weight::CarlemanParams;
use carleman::Error;
use wasm_bindgen::prelude::*;

/// Largest grid the page offers; the factorization grows like `n⁴`.
pub const MAX_N: usize = 121;

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// A factored solver on an `n × n` grid, reused across solves.
#[wasm_bindgen]
pub struct Demo {
    grid: Grid,
    solver: FixedPointSolver,
}

/// Fields are flattened with `i` (the `x` index) varying fastest.
#[wasm_bindgen]
pub struct Solution {
    field: Vec<f64>,
    exact: Vec<f64>,
    l2_diff: Vec<f64>,
    hlb_diff: Vec<f64>,
    rel_linf: f64,
    rel_l2: f64,
    iterations: usize,
    converged: bool,
}

impl Demo {
    pub fn try_new(n: usize) -> carleman::Result<Self> {
        if n > MAX_N {
            return Err(Error::InvalidConfig {
                field: "n",
                reason: format!("at most {MAX_N} in the demo, got {n}"),
            });
        }
        let grid = Grid::unit_square(n)?;
        let solver = FixedPointSolver::new(
            &grid,
            &DiffusionField::identity(&grid),
            &CarlemanParams::default(),
            &QrmConfig::default(),
        )?;
        Ok(Self { grid, solver })
    }

    pub fn run(&self, problem: &str, delta: f64, seed: u32) -> carleman::Result<Solution> {
        let id: ProblemId = problem.parse()?;
        let spec = make_problem(id, &self.grid);
        let data = sample_cauchy_data(&spec, &self.grid, &NoiseModel::uniform(delta, seed.into()))?;
        let out = self.solver.solve(&spec.nonlinearity, &data, &DriverConfig::default())?;
        let metrics = error_report(&out.solution, &spec, &self.grid)?;
        let exact = spec
            .exact
            .as_ref()
            .map(|e| e.sample(&self.grid).into_values())
            .unwrap_or_default();
        let records = out.trace.records();
        Ok(Solution {
            field: out.solution.into_values(),
            exact,
            l2_diff: records.iter().map(|r| r.l2_diff).collect(),
            hlb_diff: records.iter().map(|r| r.hlb_diff).collect(),
            rel_linf: metrics.rel_linf,
            rel_l2: metrics.rel_l2,
            iterations: out.iterations,
            converged: out.converged,
        })
    }
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize) -> Result<Demo, JsError> {
        Self::try_new(n).map_err(js)
    }

    #[wasm_bindgen(getter)]
    pub fn n(&self) -> usize {
        self.grid.n()
    }

    /// `problem` is `1`-`4`, `test1`-`test4` or `linear`.
    pub fn solve(&self, problem: &str, delta: f64, seed: u32) -> Result<Solution, JsError> {
        self.run(problem, delta, seed).map_err(js)
    }
}

#[wasm_bindgen]
impl Solution {
    #[wasm_bindgen(getter)]
    pub fn field(&self) -> Vec<f64> {
        self.field.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn exact(&self) -> Vec<f64> {
        self.exact.clone()
    }

    /// `‖u_{k+1} - u_k‖` in `L²`, one entry per iteration.
    #[wasm_bindgen(getter)]
    pub fn l2_diff(&self) -> Vec<f64> {
        self.l2_diff.clone()
    }

    /// The same differences in the weighted `H¹` norm.
    #[wasm_bindgen(getter)]
    pub fn hlb_diff(&self) -> Vec<f64> {
        self.hlb_diff.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn rel_linf(&self) -> f64 {
        self.rel_linf
    }

    #[wasm_bindgen(getter)]
    pub fn rel_l2(&self) -> f64 {
        self.rel_l2
    }

    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    #[wasm_bindgen(getter)]
    pub fn converged(&self) -> bool {
        self.converged
    }
}

/// `ln w = 2 λ |x - x₀|^{-β}` on the grid. The weight itself is within a few
/// ulps of 1 for the default center, so the page plots its logarithm.
pub fn log_weight_field(n: usize, lambda: f64, beta: f64, x0: [f64; 2]) -> carleman::Result<Vec<f64>> {
    let grid = Grid::unit_square(n)?;
    let params = CarlemanParams::new(lambda, beta, x0, &grid)?;
    (0..grid.len())
        .map(|k| params.mu(grid.point(k)).map(|mu| 2.0 * lambda * mu))
        .collect()
}

#[wasm_bindgen]
pub fn log_weight(n: usize, lambda: f64, beta: f64, x0_x: f64, x0_y: f64) -> Result<Vec<f64>, JsError> {
    log_weight_field(n, lambda, beta, [x0_x, x0_y]).map_err(js)
}
