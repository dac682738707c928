mod common;

use carleman::driver::FixedPointSolver;
use carleman::grid_fd::{normal_flux, DiffusionField, Grid, ScalarField};
use carleman::problems::{make_test, sample_cauchy_data, NoiseModel};
use carleman::qrm::{CauchyData, QrmConfig, QrmOperator, QrmSolver};
use carleman::weight::{weight_field, CarlemanParams};
use common::{field, rel_linf, DenseOracle};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

fn operator(n: usize, cfg: &QrmConfig) -> (Grid, QrmOperator) {
    let g = Grid::unit_square(n).unwrap();
    let w = weight_field(&CarlemanParams::default(), &g).unwrap();
    let op = QrmOperator::new(&g, &DiffusionField::identity(&g), &w, cfg).unwrap();
    (g, op)
}

fn dense(m: &carleman::qrm::CsrMatrix) -> DMatrix<f64> {
    let rows = m.to_dense();
    DMatrix::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
}

#[test]
fn normal_matrix_matches_dense_assembly() {
    let cfg = QrmConfig::default();
    let (g, op) = operator(11, &cfg);
    let oracle = DenseOracle::new(&g, cfg.epsilon, cfg.bc_penalty);
    let expected = oracle.reduced_matrix();
    let got = dense(op.normal_matrix());
    assert_eq!(got.shape(), expected.shape());
    for i in 0..got.nrows() {
        let scale = expected.row(i).amax();
        for j in 0..got.ncols() {
            let d = (got[(i, j)] - expected[(i, j)]).abs();
            assert!(
                d <= 1e-12 * scale,
                "entry ({i},{j}): {} vs {}",
                got[(i, j)],
                expected[(i, j)]
            );
        }
    }
}

#[test]
fn phi_step_matches_dense_oracle_on_test1() {
    for n in [11, 15] {
        let cfg = QrmConfig::default();
        let g = Grid::unit_square(n).unwrap();
        let spec = make_test(1, &g).unwrap();
        let data = sample_cauchy_data(&spec, &g, &NoiseModel::noiseless()).unwrap();
        let solver = FixedPointSolver::new(&g, &spec.diffusion, &CarlemanParams::default(), &cfg).unwrap();
        let oracle = DenseOracle::new(&g, cfg.epsilon, cfg.bc_penalty);

        let u0 = solver.initial_guess(&data).unwrap();
        let u0_ref = oracle.solve(&vec![0.0; g.len()], &data);
        assert!(rel_linf(&field(&u0), &u0_ref) < 1e-8, "n = {n}");

        let u1 = solver.qrm().phi_step(&spec.nonlinearity, &data, &u0).unwrap();
        let u1_ref = oracle.phi(&spec.nonlinearity, &data, &u0_ref);
        let err = rel_linf(&field(&u1), &u1_ref);
        assert!(err < 1e-8, "n = {n}: {err:e}");
    }
}

#[test]
fn normal_matrix_is_positive_definite() {
    let (_, op) = operator(21, &QrmConfig::default());
    let m = dense(op.normal_matrix());
    assert_eq!((&m - m.transpose()).amax(), 0.0);
    let eig = SymmetricEigen::new(m);
    let min = eig.eigenvalues.min();
    assert!(min > 0.0, "smallest eigenvalue {min:e}");
}

#[test]
fn dirichlet_data_is_reproduced_exactly() {
    let g = Grid::unit_square(17).unwrap();
    let spec = make_test(3, &g).unwrap();
    let data = sample_cauchy_data(&spec, &g, &NoiseModel::uniform(0.05, 3)).unwrap();
    let w = weight_field(&CarlemanParams::default(), &g).unwrap();
    let solver = QrmSolver::build(&g, &spec.diffusion, &w, &QrmConfig::default()).unwrap();
    let u = solver
        .phi_step(&spec.nonlinearity, &data, &ScalarField::zeros(&g))
        .unwrap();
    assert_eq!(u.boundary_values(&g), data.f);
}

#[test]
fn neumann_residual_is_bounded_by_objective() {
    let cfg = QrmConfig::default();
    let g = Grid::unit_square(17).unwrap();
    let spec = make_test(2, &g).unwrap();
    let data = sample_cauchy_data(&spec, &g, &NoiseModel::uniform(0.1, 5)).unwrap();
    let w = weight_field(&CarlemanParams::default(), &g).unwrap();
    let solver = QrmSolver::build(&g, &spec.diffusion, &w, &cfg).unwrap();
    let source = ScalarField::from_fn(&g, |x, y| x - y * y);
    let u = solver.solve(&source, &data).unwrap();
    let flux = normal_flux(&g, &spec.diffusion, &u).unwrap();
    let neumann: f64 = flux.iter().zip(&data.g).map(|(a, b)| (a - b).powi(2)).sum();
    let q = solver.operator().objective(&u, &source, &data).unwrap();
    assert!(neumann <= q / cfg.bc_penalty);
}

#[test]
fn solve_minimizes_the_objective() {
    let cfg = QrmConfig::default();
    let g = Grid::unit_square(11).unwrap();
    let w = weight_field(&CarlemanParams::default(), &g).unwrap();
    let solver = QrmSolver::build(&g, &DiffusionField::identity(&g), &w, &cfg).unwrap();
    let data = CauchyData {
        f: g.boundary().iter().map(|b| g.point(b.index)[1].cos()).collect(),
        g: g.boundary()
            .iter()
            .map(|b| -b.normal[1] * g.point(b.index)[1].sin())
            .collect(),
    };
    let source = ScalarField::from_fn(&g, |x, y| x * y);
    let u = solver.solve(&source, &data).unwrap();
    let q0 = solver.operator().objective(&u, &source, &data).unwrap();
    for k in (0..g.len()).filter(|&k| !g.is_boundary(k)).step_by(7) {
        let mut v = u.values().to_vec();
        v[k] += 1e-3;
        let perturbed = ScalarField::new(&g, v).unwrap();
        assert!(solver.operator().objective(&perturbed, &source, &data).unwrap() > q0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn argmin_is_invariant_under_joint_scaling(c in 1e-2f64..1e2, seed in 0u64..1000) {
        let g = Grid::unit_square(11).unwrap();
        let a = DiffusionField::identity(&g);
        let spec = make_test(4, &g).unwrap();
        let data = sample_cauchy_data(&spec, &g, &NoiseModel::uniform(0.05, seed)).unwrap();
        let source = ScalarField::from_fn(&g, |x, y| (3.0 * x).sin() + y);
        let w = weight_field(&CarlemanParams::default(), &g).unwrap();
        let cfg = QrmConfig::default();
        let base = QrmSolver::build(&g, &a, &w, &cfg).unwrap().solve(&source, &data).unwrap();
        let scaled_cfg = QrmConfig { epsilon: c * cfg.epsilon, bc_penalty: c * cfg.bc_penalty, ..cfg };
        let scaled = QrmSolver::build(&g, &a, &w.scale(c), &scaled_cfg).unwrap().solve(&source, &data).unwrap();
        prop_assert!(rel_linf(&field(&scaled), &field(&base)) < 1e-8);
    }
}
