//! Bundled manufactured test problems on `(-1, 1)²` with `A = I`, boundary
//! data sampling with multiplicative noise, and relative error reporting.

use crate::error::{Error, Result};
use crate::grid_fd::{l2_norm, DiffusionField, Grid, ScalarField};
use crate::nonlinearity::NonlinearitySpec;
use crate::qrm::CauchyData;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemId {
    Test1,
    Test2,
    Test3,
    Test4,
    /// `F ≡ 0` with `u* = x + y`.
    Linear,
}

impl ProblemId {
    pub const TABLES: [ProblemId; 4] = [Self::Test1, Self::Test2, Self::Test3, Self::Test4];

    pub fn from_index(k: usize) -> Result<Self> {
        match k {
            1 => Ok(Self::Test1),
            2 => Ok(Self::Test2),
            3 => Ok(Self::Test3),
            4 => Ok(Self::Test4),
            _ => Err(Error::UnknownProblem(k.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Test1 => "test1",
            Self::Test2 => "test2",
            Self::Test3 => "test3",
            Self::Test4 => "test4",
            Self::Linear => "linear",
        }
    }

    /// Numeric id used in seed derivation (0 for the linear problem).
    pub fn number(&self) -> u64 {
        match self {
            Self::Test1 => 1,
            Self::Test2 => 2,
            Self::Test3 => 3,
            Self::Test4 => 4,
            Self::Linear => 0,
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "1" | "test1" => Ok(Self::Test1),
            "2" | "test2" => Ok(Self::Test2),
            "3" | "test3" => Ok(Self::Test3),
            "4" | "test4" => Ok(Self::Test4),
            "linear" | "zero" => Ok(Self::Linear),
            _ => Err(Error::UnknownProblem(s.to_string())),
        }
    }
}

type ScalarFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>;

/// Closed-form solution and gradient.
#[derive(Clone)]
pub struct ExactSolution {
    pub value: ScalarFn,
    pub gradient: VectorFn,
}

impl ExactSolution {
    pub fn new(
        value: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(f64, f64) -> [f64; 2] + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            gradient: Arc::new(gradient),
        }
    }

    pub fn sample(&self, grid: &Grid) -> ScalarField {
        ScalarField::from_fn(grid, |x, y| (self.value)(x, y))
    }
}

impl fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ExactSolution")
    }
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub diffusion: DiffusionField,
    /// Includes the manufactured source term.
    pub nonlinearity: NonlinearitySpec,
    pub exact: Option<ExactSolution>,
}

fn identity_problem(
    grid: &Grid,
    id: ProblemId,
    f: impl Fn([f64; 2], f64, [f64; 2]) -> f64 + Send + Sync + 'static,
    exact: ExactSolution,
) -> ProblemSpec {
    ProblemSpec {
        name: id.name().to_string(),
        diffusion: DiffusionField::identity(grid),
        nonlinearity: NonlinearitySpec::new(f),
        exact: Some(exact),
    }
}

/// Test 4's discontinuous term: `s² - exp(p₂)` while `exp(p₂) < 30`, else 0.
pub fn test4_g(s: f64, p: [f64; 2]) -> f64 {
    let e = p[1].exp();
    if e < 30.0 {
        s * s - e
    } else {
        0.0
    }
}

/// Builds bundled problem `id` on `grid`.
pub fn make_problem(id: ProblemId, grid: &Grid) -> ProblemSpec {
    match id {
        // Δu + u + sqrt(|∇u|² + 1) = source, u* = sin(π(x + y))
        ProblemId::Test1 => identity_problem(
            grid,
            id,
            |x, s, p| {
                let t = PI * (x[0] + x[1]);
                let (sin, cos) = t.sin_cos();
                let source = -2.0 * PI * PI * sin + sin + (2.0 * PI * PI * cos * cos + 1.0).sqrt();
                s + (p[0] * p[0] + p[1] * p[1] + 1.0).sqrt() - source
            },
            ExactSolution::new(
                |x, y| (PI * (x + y)).sin(),
                |x, y| {
                    let c = PI * (PI * (x + y)).cos();
                    [c, c]
                },
            ),
        ),
        // Δu + u_x - u_y² = -2 + 2x - 16y², u* = x² - 2y²
        ProblemId::Test2 => identity_problem(
            grid,
            id,
            |x, _s, p| p[0] - p[1] * p[1] - (-2.0 + 2.0 * x[0] - 16.0 * x[1] * x[1]),
            ExactSolution::new(|x, y| x * x - 2.0 * y * y, |x, y| [2.0 * x, -4.0 * y]),
        ),
        // Δu + |u_x| - |u_y| + 4π(πρ sin πρ - cos πρ) - 2π(|x cos πρ| - |y cos πρ|) = 0,
        // u* = sin(πρ), ρ = x² + y²
        ProblemId::Test3 => identity_problem(
            grid,
            id,
            |x, _s, p| {
                let rho = x[0] * x[0] + x[1] * x[1];
                let (sin, cos) = (PI * rho).sin_cos();
                p[0].abs() - p[1].abs() + 4.0 * PI * (PI * rho * sin - cos)
                    - 2.0 * PI * ((x[0] * cos).abs() - (x[1] * cos).abs())
            },
            ExactSolution::new(
                |x, y| (PI * (x * x + y * y)).sin(),
                |x, y| {
                    let c = 2.0 * PI * (PI * (x * x + y * y)).cos();
                    [c * x, c * y]
                },
            ),
        ),
        // Δu + G(u, ∇u) = Δu* + G(u*, ∇u*), u* = sin(4πx - 2πy²) + y
        ProblemId::Test4 => identity_problem(
            grid,
            id,
            |x, s, p| {
                let (xx, y) = (x[0], x[1]);
                let theta = 4.0 * PI * xx - 2.0 * PI * y * y;
                let (sin, cos) = theta.sin_cos();
                let u = sin + y;
                let uy = -4.0 * PI * y * cos + 1.0;
                let lap = -16.0 * PI * PI * (1.0 + y * y) * sin - 4.0 * PI * cos;
                test4_g(s, p) - test4_g(u, [4.0 * PI * cos, uy]) - lap
            },
            ExactSolution::new(
                |x, y| (4.0 * PI * x - 2.0 * PI * y * y).sin() + y,
                |x, y| {
                    let cos = (4.0 * PI * x - 2.0 * PI * y * y).cos();
                    [4.0 * PI * cos, -4.0 * PI * y * cos + 1.0]
                },
            ),
        ),
        ProblemId::Linear => ProblemSpec {
            name: id.name().to_string(),
            diffusion: DiffusionField::identity(grid),
            nonlinearity: NonlinearitySpec::zero(),
            exact: Some(ExactSolution::new(|x, y| x + y, |_, _| [1.0, 1.0])),
        },
    }
}

/// Bundled test `k ∈ {1, 2, 3, 4}`.
pub fn make_test(k: usize, grid: &Grid) -> Result<ProblemSpec> {
    Ok(make_problem(ProblemId::from_index(k)?, grid))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum NoiseDistribution {
    /// Independent uniform draws on `[-1, 1]`.
    #[default]
    Uniform,
    /// Every draw returns this value (for testing the endpoints).
    Constant(f64),
}

/// `f = f*(1 + δ rand₁)`, `g = g*(1 + δ rand₂)`, drawn per boundary node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub delta: f64,
    pub seed: u64,
    #[serde(default)]
    pub distribution: NoiseDistribution,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            delta: 0.0,
            seed: 0,
            distribution: NoiseDistribution::Uniform,
        }
    }

    pub fn uniform(delta: f64, seed: u64) -> Self {
        Self {
            delta,
            seed,
            distribution: NoiseDistribution::Uniform,
        }
    }

    /// `count` draws for `f` followed by `count` independent draws for `g`.
    pub fn draws(&self, count: usize) -> (Vec<f64>, Vec<f64>) {
        match self.distribution {
            NoiseDistribution::Constant(c) => (vec![c; count], vec![c; count]),
            NoiseDistribution::Uniform => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let f = (0..count).map(|_| rng.random_range(-1.0..=1.0)).collect();
                let g = (0..count).map(|_| rng.random_range(-1.0..=1.0)).collect();
                (f, g)
            }
        }
    }
}

/// Seed for one (problem, noise level) cell of a table run: the first word of
/// the ChaCha8 stream `256 * problem + delta_index` keyed by `global`.
pub fn cell_seed(global: u64, problem: ProblemId, delta_index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(global);
    rng.set_stream(256 * problem.number() + delta_index as u64);
    rng.random()
}

/// Samples `u*` and `A∇u*·ν` (analytic gradient) on the boundary and applies the noise.
pub fn sample_cauchy_data(spec: &ProblemSpec, grid: &Grid, noise: &NoiseModel) -> Result<CauchyData> {
    let exact = spec
        .exact
        .as_ref()
        .ok_or_else(|| Error::MissingExactSolution(spec.name.clone()))?;
    if !(noise.delta >= 0.0 && noise.delta.is_finite()) {
        return Err(Error::InvalidConfig {
            field: "delta",
            reason: format!("noise level must be finite and non-negative, got {}", noise.delta),
        });
    }
    let nb = grid.boundary().len();
    let (r1, r2) = if noise.delta == 0.0 {
        (vec![0.0; nb], vec![0.0; nb])
    } else {
        noise.draws(nb)
    };
    let mut f = Vec::with_capacity(nb);
    let mut g = Vec::with_capacity(nb);
    for (slot, b) in grid.boundary().iter().enumerate() {
        let [x, y] = grid.point(b.index);
        let flux = spec.diffusion.at(b.index).apply((exact.gradient)(x, y));
        let g_star = flux[0] * b.normal[0] + flux[1] * b.normal[1];
        f.push((exact.value)(x, y) * (1.0 + noise.delta * r1[slot]));
        g.push(g_star * (1.0 + noise.delta * r2[slot]));
    }
    Ok(CauchyData { f, g })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    pub rel_linf: f64,
    pub rel_l2: f64,
}

/// Relative `L∞` and `L²` errors against the exact solution.
pub fn error_report(u_comp: &ScalarField, spec: &ProblemSpec, grid: &Grid) -> Result<ErrorMetrics> {
    let exact = spec
        .exact
        .as_ref()
        .ok_or_else(|| Error::MissingExactSolution(spec.name.clone()))?;
    grid.check_len(u_comp.len())?;
    let u_star = exact.sample(grid);
    let diff = u_star.sub(u_comp);
    Ok(ErrorMetrics {
        rel_linf: diff.max_abs() / u_star.max_abs(),
        rel_l2: l2_norm(grid, &diff) / l2_norm(grid, &u_star),
    })
}
