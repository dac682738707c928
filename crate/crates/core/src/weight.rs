//! Carleman weight `w(x) = exp(2 λ |x - x₀|^{-β})` and the weighted `H¹` norm
//! used to measure contraction of the fixed-point map.

use crate::error::{Error, Result};
use crate::grid_fd::{gradient, Grid, ScalarField};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CarlemanParams {
    pub lambda: f64,
    pub beta: f64,
    pub x0: [f64; 2],
}

impl Default for CarlemanParams {
    fn default() -> Self {
        Self {
            lambda: 3.0,
            beta: 10.0,
            x0: [0.0, 9.0],
        }
    }
}

impl CarlemanParams {
    /// Validates the parameters against `grid`: `x₀` must lie outside the
    /// closed rectangle and every node must be at distance `> 1` from it.
    /// `λ = 0` is accepted and gives the unweighted functional.
    pub fn new(lambda: f64, beta: f64, x0: [f64; 2], grid: &Grid) -> Result<Self> {
        let p = Self { lambda, beta, x0 };
        p.validate(grid)?;
        Ok(p)
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidCarleman(format!(
                "lambda must be finite and non-negative, got {}",
                self.lambda
            )));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidCarleman(format!(
                "beta must be finite and positive, got {}",
                self.beta
            )));
        }
        if grid.contains(self.x0) {
            return Err(Error::InvalidCarleman(format!(
                "x0 = ({}, {}) lies in the closed domain",
                self.x0[0], self.x0[1]
            )));
        }
        for k in 0..grid.len() {
            self.mu(grid.point(k))?;
        }
        Ok(())
    }

    pub fn distance(&self, x: [f64; 2]) -> f64 {
        f64::hypot(x[0] - self.x0[0], x[1] - self.x0[1])
    }

    /// `μ(x) = |x - x₀|^{-β}`, defined for `|x - x₀| > 1`.
    pub fn mu(&self, x: [f64; 2]) -> Result<f64> {
        let r = self.distance(x);
        if !(r > 1.0) {
            return Err(Error::WeightDomain {
                x: x[0],
                y: x[1],
                distance: r,
            });
        }
        Ok(r.powf(-self.beta))
    }

    /// `exp(2 λ μ(x))`.
    pub fn weight(&self, x: [f64; 2]) -> Result<f64> {
        Ok((2.0 * self.lambda * self.mu(x)?).exp())
    }
}

pub fn mu(params: &CarlemanParams, x: [f64; 2]) -> Result<f64> {
    params.mu(x)
}

pub fn weight_field(params: &CarlemanParams, grid: &Grid) -> Result<ScalarField> {
    let values = (0..grid.len())
        .map(|k| params.weight(grid.point(k)))
        .collect::<Result<Vec<_>>>()?;
    ScalarField::new(grid, values)
}

/// `sqrt(dx dy Σ w (u² + |∇u|²))` for a precomputed weight field.
pub fn weighted_h1_norm(grid: &Grid, weight: &ScalarField, u: &ScalarField) -> Result<f64> {
    grid.check_len(weight.len())?;
    let (gx, gy) = gradient(grid, u)?;
    let sum: f64 = (0..grid.len())
        .map(|k| weight[k] * (u[k] * u[k] + gx[k] * gx[k] + gy[k] * gy[k]))
        .sum();
    Ok((grid.cell_area() * sum).sqrt())
}

/// The Carleman-weighted norm `H_{λ,β}`.
pub fn h_lambda_beta_norm(params: &CarlemanParams, grid: &Grid, u: &ScalarField) -> Result<f64> {
    let w = weight_field(params, grid)?;
    weighted_h1_norm(grid, &w, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_fd::l2_norm;
    use proptest::prelude::*;

    fn square(n: usize) -> Grid {
        Grid::unit_square(n).unwrap()
    }

    #[test]
    fn mu_examples() {
        let p = CarlemanParams::default();
        // r = 8, 8^-10
        let m = p.mu([0.0, 1.0]).unwrap();
        assert!((m - 9.313225746154785e-10).abs() < 1e-22);

        let q = CarlemanParams {
            lambda: 1.0,
            beta: 1.0,
            x0: [2.0, 0.0],
        };
        assert_eq!(q.mu([0.0, 0.0]).unwrap(), 0.5);
        assert!(matches!(q.mu([1.5, 0.0]), Err(Error::WeightDomain { .. })));
    }

    #[test]
    fn default_is_lambda3_beta10_x0_0_9() {
        let p = CarlemanParams::default();
        assert_eq!((p.lambda, p.beta, p.x0), (3.0, 10.0, [0.0, 9.0]));
        p.validate(&square(150)).unwrap();
    }

    #[test]
    fn weight_examples() {
        let g = square(21);
        let flat = CarlemanParams {
            lambda: 0.0,
            ..Default::default()
        };
        let w = weight_field(&flat, &g).unwrap();
        assert!(w.values().iter().all(|&v| v == 1.0));

        let p = CarlemanParams::default();
        let top = p.weight([0.0, 1.0]).unwrap();
        assert!((top - 1.0 - 6.0 * 9.313225746154785e-10).abs() < 1e-15);
        assert!(top > p.weight([0.0, -1.0]).unwrap());
    }

    #[test]
    fn rejects_center_inside_or_too_close() {
        let g = square(11);
        assert!(CarlemanParams::new(3.0, 10.0, [0.0, 0.5], &g).is_err());
        assert!(CarlemanParams::new(3.0, 10.0, [0.0, 1.5], &g).is_err());
        assert!(CarlemanParams::new(3.0, -1.0, [0.0, 9.0], &g).is_err());
        assert!(CarlemanParams::new(3.0, 10.0, [0.0, 9.0], &g).is_ok());
    }

    #[test]
    fn weight_bounds_and_monotonicity() {
        let g = square(41);
        for p in [
            CarlemanParams::default(),
            CarlemanParams {
                lambda: 2.0,
                beta: 1.5,
                x0: [0.0, 2.5],
            },
        ] {
            let w = weight_field(&p, &g).unwrap();
            let mut by_r: Vec<(f64, f64)> = (0..g.len()).map(|k| (p.distance(g.point(k)), w[k])).collect();
            for &(r, wk) in &by_r {
                let m = r.powf(-p.beta);
                assert!(m > 0.0 && m < 1.0);
                assert!(wk > 1.0 && wk < (2.0 * p.lambda).exp());
            }
            by_r.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            for pair in by_r.windows(2) {
                if pair[1].0 > pair[0].0 {
                    assert!(pair[1].1 <= pair[0].1);
                }
            }
        }
        // strict decrease is visible once the weight is far from 1
        let p = CarlemanParams {
            lambda: 2.0,
            beta: 1.5,
            x0: [0.0, 2.5],
        };
        assert!(p.weight([0.0, 1.0]).unwrap() > p.weight([0.0, 0.9]).unwrap());
    }

    #[test]
    fn norm_examples() {
        let g = square(31);
        let p = CarlemanParams::default();
        assert_eq!(h_lambda_beta_norm(&p, &g, &ScalarField::zeros(&g)).unwrap(), 0.0);

        let flat = CarlemanParams { lambda: 0.0, ..p };
        let one = ScalarField::constant(&g, 1.0);
        let n1 = h_lambda_beta_norm(&flat, &g, &one).unwrap();
        assert!((n1 - l2_norm(&g, &one)).abs() < 1e-12);
        assert!((n1 - 2.0).abs() < 2.0 * g.dx());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn weighted_norm_axioms(
            u in prop::collection::vec(-5.0f64..5.0, 81),
            v in prop::collection::vec(-5.0f64..5.0, 81),
            alpha in -4.0f64..4.0,
        ) {
            let g = square(9);
            let p = CarlemanParams { lambda: 1.5, beta: 2.0, x0: [0.0, 3.0] };
            let u = ScalarField::new(&g, u).unwrap();
            let v = ScalarField::new(&g, v).unwrap();
            let nu = h_lambda_beta_norm(&p, &g, &u).unwrap();
            let nv = h_lambda_beta_norm(&p, &g, &v).unwrap();
            let nsum = h_lambda_beta_norm(&p, &g, &u.combine(1.0, &v, 1.0)).unwrap();
            let nscaled = h_lambda_beta_norm(&p, &g, &u.scale(alpha)).unwrap();
            prop_assert!(nsum <= nu + nv + 1e-10 * (nu + nv));
            prop_assert!((nscaled - alpha.abs() * nu).abs() <= 1e-10 * nu.max(1.0));
            prop_assert!(nu >= l2_norm(&g, &u));
        }
    }
}
