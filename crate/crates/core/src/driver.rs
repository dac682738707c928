//! Outer fixed-point loop `u_{n+1} = Φ(u_n)` with an `L²` stopping rule.

use crate::error::{Error, Result};
use crate::grid_fd::{l2_norm, DiffusionField, Grid, ScalarField};
use crate::nonlinearity::NonlinearitySpec;
use crate::qrm::{CauchyData, QrmConfig, QrmSolver};
use crate::weight::{weight_field, weighted_h1_norm, CarlemanParams};
use serde::{Deserialize, Serialize};
use web_time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialGuess {
    /// Solve with the nonlinearity removed.
    #[default]
    Linearized,
    /// Start from `u ≡ 0`, pushed into the admissible set by one `Φ` step.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriverConfig {
    pub kappa0: f64,
    pub max_iter: usize,
    pub record_trace: bool,
    pub initial: InitialGuess,
}

impl Default for DriverConfig {
    fn default() -> Self {
        Self {
            kappa0: 1e-3,
            max_iter: 50,
            record_trace: true,
            initial: InitialGuess::Linearized,
        }
    }
}

impl DriverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa0 > 0.0 && self.kappa0.is_finite()) {
            return Err(Error::InvalidConfig {
                field: "kappa0",
                reason: format!("must be finite and positive, got {}", self.kappa0),
            });
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig {
                field: "max_iter",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based loop iteration.
    pub iter: usize,
    /// `‖u_{n+1} - u_n‖` in the discrete `L²` norm.
    pub l2_diff: f64,
    /// `‖u_{n+1} - u_n‖` in the Carleman-weighted `H¹` norm.
    pub hlb_diff: f64,
    /// `hlb_diff` over the previous one; absent on the first iteration.
    pub ratio: Option<f64>,
    /// Wall time of this iteration.
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a trace from weighted differences alone (timings and `L²` set to the same values).
    pub fn from_differences(diffs: &[f64]) -> Self {
        let mut t = Self::new();
        for &d in diffs {
            t.push(d, d, 0.0);
        }
        t
    }

    pub fn push(&mut self, l2_diff: f64, hlb_diff: f64, seconds: f64) {
        let ratio = self.records.last().map(|r| hlb_diff / r.hlb_diff);
        self.records.push(IterationRecord {
            iter: self.records.len() + 1,
            l2_diff,
            hlb_diff,
            ratio,
            seconds,
        });
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }
}

/// Everything the loop needs apart from the driver settings.
#[derive(Debug, Clone)]
pub struct CauchyProblem {
    pub grid: Grid,
    pub diffusion: DiffusionField,
    pub nonlinearity: NonlinearitySpec,
    pub data: CauchyData,
    pub carleman: CarlemanParams,
    pub qrm: QrmConfig,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    /// `u_comp`: the last iterate on success, the best one otherwise.
    pub solution: ScalarField,
    pub trace: IterationTrace,
    pub converged: bool,
    /// Number of `Φ` applications in the loop (the initial guess is not counted).
    pub iterations: usize,
    /// `u_{n+1} - u_n` at the final iteration.
    pub last_difference: ScalarField,
    pub seconds: f64,
}

/// The factored quasi-reversibility operator plus the Carleman weight, reusable
/// across Cauchy data and nonlinearities on the same grid and diffusion field.
pub struct FixedPointSolver {
    qrm: QrmSolver,
    weight: ScalarField,
}

impl FixedPointSolver {
    pub fn new(grid: &Grid, a: &DiffusionField, params: &CarlemanParams, cfg: &QrmConfig) -> Result<Self> {
        params.validate(grid)?;
        let weight = weight_field(params, grid)?;
        let qrm = QrmSolver::build(grid, a, &weight, cfg)?;
        Ok(Self { qrm, weight })
    }

    pub fn for_problem(problem: &CauchyProblem) -> Result<Self> {
        Self::new(&problem.grid, &problem.diffusion, &problem.carleman, &problem.qrm)
    }

    pub fn grid(&self) -> &Grid {
        self.qrm.operator().grid()
    }

    pub fn qrm(&self) -> &QrmSolver {
        &self.qrm
    }

    pub fn weight(&self) -> &ScalarField {
        &self.weight
    }

    /// One quasi-reversibility solve of the Cauchy problem with `F ≡ 0`.
    pub fn initial_guess(&self, data: &CauchyData) -> Result<ScalarField> {
        self.qrm.solve(&ScalarField::zeros(self.grid()), data)
    }

    pub fn start(&self, spec: &NonlinearitySpec, data: &CauchyData, how: InitialGuess) -> Result<ScalarField> {
        match how {
            InitialGuess::Linearized => self.initial_guess(data),
            InitialGuess::Zero => self.qrm.phi_step(spec, data, &ScalarField::zeros(self.grid())),
        }
    }

    pub fn weighted_norm(&self, u: &ScalarField) -> Result<f64> {
        weighted_h1_norm(self.grid(), &self.weight, u)
    }

    pub fn solve(&self, spec: &NonlinearitySpec, data: &CauchyData, cfg: &DriverConfig) -> Result<SolveOutcome> {
        cfg.validate()?;
        let started = Instant::now();
        let mut u = self.start(spec, data, cfg.initial)?;
        let grid = self.grid();
        let mut trace = IterationTrace::new();
        let mut best: Option<(f64, ScalarField)> = None;

        for _ in 0..cfg.max_iter {
            let t0 = Instant::now();
            let next = match self.qrm.phi_step(spec, data, &u) {
                Ok(v) => v,
                Err(e) => {
                    return Err(Error::Aborted {
                        source: Box::new(e),
                        trace,
                    })
                }
            };
            let diff = next.sub(&u);
            let l2 = l2_norm(grid, &diff);
            let hlb = self.weighted_norm(&diff)?;
            trace.push(l2, hlb, t0.elapsed().as_secs_f64());
            if l2 <= cfg.kappa0 {
                let iterations = trace.len();
                return Ok(SolveOutcome {
                    solution: next,
                    trace: self.keep(trace, cfg),
                    converged: true,
                    iterations,
                    last_difference: diff,
                    seconds: started.elapsed().as_secs_f64(),
                });
            }
            if best.as_ref().is_none_or(|(d, _)| l2 < *d) {
                best = Some((l2, next.clone()));
            }
            if cfg.max_iter == trace.len() {
                let iterations = trace.len();
                let solution = best.map(|(_, v)| v).unwrap_or(next);
                return Ok(SolveOutcome {
                    solution,
                    trace: self.keep(trace, cfg),
                    converged: false,
                    iterations,
                    last_difference: diff,
                    seconds: started.elapsed().as_secs_f64(),
                });
            }
            u = next;
        }
        unreachable!("loop returns at max_iter")
    }

    fn keep(&self, trace: IterationTrace, cfg: &DriverConfig) -> IterationTrace {
        if cfg.record_trace {
            trace
        } else {
            IterationTrace::new()
        }
    }
}

pub fn initial_guess(problem: &CauchyProblem) -> Result<ScalarField> {
    FixedPointSolver::for_problem(problem)?.initial_guess(&problem.data)
}

pub fn fixed_point_solve(problem: &CauchyProblem, cfg: &DriverConfig) -> Result<SolveOutcome> {
    FixedPointSolver::for_problem(problem)?.solve(&problem.nonlinearity, &problem.data, cfg)
}

/// Successive ratios `d_{n+1} / d_n` of the weighted differences.
pub fn contraction_ratio(trace: &IterationTrace) -> Result<Vec<f64>> {
    if trace.len() < 3 {
        return Err(Error::TraceTooShort {
            required: 3,
            found: trace.len(),
        });
    }
    Ok(trace
        .records()
        .windows(2)
        .map(|w| w[1].hlb_diff / w[0].hlb_diff)
        .collect())
}
