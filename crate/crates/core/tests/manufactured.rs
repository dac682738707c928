//! The bundled problems are consistent: each exact solution satisfies its PDE.

mod common;

use carleman::grid_fd::Grid;
use carleman::nonlinearity::eval_f;
use carleman::problems::{make_test, ProblemSpec};
use common::by_hand;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn residual(spec: &ProblemSpec, test: usize, x: f64, y: f64) -> f64 {
    let d = by_hand(test, x, y);
    d.laplacian + eval_f(&spec.nonlinearity, [x, y], d.u, d.grad).unwrap()
}

#[test]
fn exact_solutions_satisfy_their_equations() {
    let grid = Grid::unit_square(11).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for test in 1..=4 {
        let spec = make_test(test, &grid).unwrap();
        let exact = spec.exact.clone().unwrap();
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let (x, y) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            worst = worst.max(residual(&spec, test, x, y).abs());
            let d = by_hand(test, x, y);
            assert!(((exact.value)(x, y) - d.u).abs() <= 1e-14);
            let g = (exact.gradient)(x, y);
            assert!((g[0] - d.grad[0]).abs() <= 1e-12 && (g[1] - d.grad[1]).abs() <= 1e-12);
        }
        assert!(worst <= 1e-12, "test {test}: residual {worst:e}");
    }
}

#[test]
fn residual_vanishes_on_grid_nodes_and_corners() {
    let grid = Grid::unit_square(150).unwrap();
    for test in 1..=4 {
        let spec = make_test(test, &grid).unwrap();
        for k in (0..grid.len()).step_by(37).chain([0, grid.len() - 1]) {
            let [x, y] = grid.point(k);
            assert!(residual(&spec, test, x, y).abs() <= 1e-12, "test {test} at ({x}, {y})");
        }
    }
}

#[test]
fn test1_nonlinearity_vanishes_at_the_origin_gradient() {
    // At x = (0, 0): u* = 0, ∇u* = (π, π), Δu* = 0, so F must vanish there.
    let grid = Grid::unit_square(11).unwrap();
    let spec = make_test(1, &grid).unwrap();
    let v = eval_f(&spec.nonlinearity, [0.0, 0.0], 0.0, [PI, PI]).unwrap();
    assert!(v.abs() < 1e-14, "{v}");
}
