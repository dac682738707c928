use super::stencil::{d_x, d_xx, d_xy, d_y, d_yy, div_a_grad_row, normal_flux_row};
use super::{DiffusionField, Grid, ScalarField};
use crate::error::Result;

fn check(grid: &Grid, u: &ScalarField) -> Result<()> {
    grid.check_len(u.len())
}

/// Discrete `Div(A ∇u)` at every node.
pub fn div_a_grad(grid: &Grid, a: &DiffusionField, u: &ScalarField) -> Result<ScalarField> {
    check(grid, u)?;
    grid.check_len(a.len())?;
    let v = u.values();
    let out = (0..grid.len()).map(|k| div_a_grad_row(grid, a, k).apply(v)).collect();
    Ok(ScalarField::from_vec_unchecked(out))
}

/// `(u_x, u_y)` at every node.
pub fn gradient(grid: &Grid, u: &ScalarField) -> Result<(ScalarField, ScalarField)> {
    check(grid, u)?;
    let v = u.values();
    let gx = (0..grid.len()).map(|k| d_x(grid, k).apply(v)).collect();
    let gy = (0..grid.len()).map(|k| d_y(grid, k).apply(v)).collect();
    Ok((ScalarField::from_vec_unchecked(gx), ScalarField::from_vec_unchecked(gy)))
}

/// `(u_xx, u_xy, u_yy)` at every node.
pub fn hessian(grid: &Grid, u: &ScalarField) -> Result<[ScalarField; 3]> {
    check(grid, u)?;
    let v = u.values();
    let each = |row: fn(&Grid, usize) -> super::Stencil| {
        ScalarField::from_vec_unchecked((0..grid.len()).map(|k| row(grid, k).apply(v)).collect())
    };
    Ok([each(d_xx), each(d_xy), each(d_yy)])
}

/// `A ∇u · ν` at each boundary node, in [`Grid::boundary`] order.
pub fn normal_flux(grid: &Grid, a: &DiffusionField, u: &ScalarField) -> Result<Vec<f64>> {
    check(grid, u)?;
    grid.check_len(a.len())?;
    let v = u.values();
    Ok((0..grid.boundary().len())
        .map(|slot| normal_flux_row(grid, a, slot).apply(v))
        .collect())
}

/// Discrete `L²(Ω)` norm: `sqrt(dx dy Σ u²)` over all nodes.
pub fn l2_norm(grid: &Grid, u: &ScalarField) -> f64 {
    (grid.cell_area() * u.values().iter().map(|v| v * v).sum::<f64>()).sqrt()
}
