use super::{DiffusionField, Grid};

/// A linear functional on nodal values: sorted, duplicate-free `(node, coefficient)` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stencil {
    entries: Vec<(usize, f64)>,
}

impl Stencil {
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn apply(&self, values: &[f64]) -> f64 {
        self.entries.iter().map(|&(k, c)| c * values[k]).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Default)]
pub struct StencilBuilder {
    raw: Vec<(usize, f64)>,
}

impl StencilBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, node: usize, coef: f64) -> &mut Self {
        self.raw.push((node, coef));
        self
    }

    pub fn add_scaled(&mut self, other: &Stencil, scale: f64) -> &mut Self {
        if scale != 0.0 {
            self.raw.extend(other.entries.iter().map(|&(k, c)| (k, c * scale)));
        }
        self
    }

    pub fn build(mut self) -> Stencil {
        self.raw.sort_by_key(|e| e.0);
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(self.raw.len());
        for (k, c) in self.raw {
            match entries.last_mut() {
                Some(last) if last.0 == k => last.1 += c,
                _ => entries.push((k, c)),
            }
        }
        entries.retain(|e| e.1 != 0.0);
        Stencil { entries }
    }
}

/// One-dimensional difference taps along an axis, as (axis index, coefficient).
#[derive(Debug, Clone, Copy)]
struct Taps {
    idx: [usize; 4],
    coef: [f64; 4],
    len: usize,
}

impl Taps {
    fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.len).map(move |t| (self.idx[t], self.coef[t]))
    }
}

/// Second-order first derivative: centered inside, one-sided at either end.
fn first_taps(i: usize, n: usize, h: f64) -> Taps {
    let s = 0.5 / h;
    if i == 0 {
        Taps {
            idx: [0, 1, 2, 0],
            coef: [-3.0 * s, 4.0 * s, -s, 0.0],
            len: 3,
        }
    } else if i == n - 1 {
        Taps {
            idx: [n - 1, n - 2, n - 3, 0],
            coef: [3.0 * s, -4.0 * s, s, 0.0],
            len: 3,
        }
    } else {
        Taps {
            idx: [i - 1, i + 1, 0, 0],
            coef: [-s, s, 0.0, 0.0],
            len: 2,
        }
    }
}

/// Second-order second derivative: 3-point centered inside, 4-point one-sided at the ends.
fn second_taps(i: usize, n: usize, h: f64) -> Taps {
    let s = 1.0 / (h * h);
    if i == 0 {
        Taps {
            idx: [0, 1, 2, 3],
            coef: [2.0 * s, -5.0 * s, 4.0 * s, -s],
            len: 4,
        }
    } else if i == n - 1 {
        Taps {
            idx: [n - 1, n - 2, n - 3, n - 4],
            coef: [2.0 * s, -5.0 * s, 4.0 * s, -s],
            len: 4,
        }
    } else {
        Taps {
            idx: [i - 1, i, i + 1, 0],
            coef: [s, -2.0 * s, s, 0.0],
            len: 3,
        }
    }
}

fn along_x(grid: &Grid, taps: Taps, j: usize, scale: f64, out: &mut StencilBuilder) {
    for (ii, c) in taps.iter() {
        out.add(grid.index(ii, j), c * scale);
    }
}

fn along_y(grid: &Grid, taps: Taps, i: usize, scale: f64, out: &mut StencilBuilder) {
    for (jj, c) in taps.iter() {
        out.add(grid.index(i, jj), c * scale);
    }
}

pub fn d_x(grid: &Grid, k: usize) -> Stencil {
    let (i, j) = grid.ij(k);
    let mut b = StencilBuilder::new();
    along_x(grid, first_taps(i, grid.n(), grid.dx()), j, 1.0, &mut b);
    b.build()
}

pub fn d_y(grid: &Grid, k: usize) -> Stencil {
    let (i, j) = grid.ij(k);
    let mut b = StencilBuilder::new();
    along_y(grid, first_taps(j, grid.n(), grid.dy()), i, 1.0, &mut b);
    b.build()
}

pub fn d_xx(grid: &Grid, k: usize) -> Stencil {
    let (i, j) = grid.ij(k);
    let mut b = StencilBuilder::new();
    along_x(grid, second_taps(i, grid.n(), grid.dx()), j, 1.0, &mut b);
    b.build()
}

pub fn d_yy(grid: &Grid, k: usize) -> Stencil {
    let (i, j) = grid.ij(k);
    let mut b = StencilBuilder::new();
    along_y(grid, second_taps(j, grid.n(), grid.dy()), i, 1.0, &mut b);
    b.build()
}

/// Mixed derivative as the tensor product of the two first-derivative taps.
/// At interior nodes this is the standard 4-point cross stencil.
pub fn d_xy(grid: &Grid, k: usize) -> Stencil {
    let (i, j) = grid.ij(k);
    let tx = first_taps(i, grid.n(), grid.dx());
    let ty = first_taps(j, grid.n(), grid.dy());
    let mut b = StencilBuilder::new();
    for (jj, cy) in ty.iter() {
        for (ii, cx) in tx.iter() {
            b.add(grid.index(ii, jj), cx * cy);
        }
    }
    b.build()
}

/// Row of the discrete `Div(A ∇u)` at node `k`.
///
/// Interior nodes use the conservative flux form with arithmetic face averages
/// of `a11`, `a22` and centered cross fluxes for `a12`. Boundary nodes use the
/// expanded form `a11 u_xx + 2 a12 u_xy + a22 u_yy + (∂x a11 + ∂y a12) u_x + (∂x a12 + ∂y a22) u_y`
/// with one-sided taps, the coefficient derivatives taken with the same taps.
pub fn div_a_grad_row(grid: &Grid, a: &DiffusionField, k: usize) -> Stencil {
    let (i, j) = grid.ij(k);
    let n = grid.n();
    let interior = i > 0 && i < n - 1 && j > 0 && j < n - 1;
    let mut b = StencilBuilder::new();

    if a.is_identity() {
        along_x(grid, second_taps(i, n, grid.dx()), j, 1.0, &mut b);
        along_y(grid, second_taps(j, n, grid.dy()), i, 1.0, &mut b);
        return b.build();
    }

    if interior {
        let (hx2, hy2) = (grid.dx() * grid.dx(), grid.dy() * grid.dy());
        let t = |ii, jj| a.at(grid.index(ii, jj));
        let c = t(i, j);
        let e = 0.5 * (c.a11 + t(i + 1, j).a11) / hx2;
        let w = 0.5 * (c.a11 + t(i - 1, j).a11) / hx2;
        let nn = 0.5 * (c.a22 + t(i, j + 1).a22) / hy2;
        let s = 0.5 * (c.a22 + t(i, j - 1).a22) / hy2;
        b.add(grid.index(i + 1, j), e)
            .add(grid.index(i - 1, j), w)
            .add(grid.index(i, j + 1), nn)
            .add(grid.index(i, j - 1), s)
            .add(k, -(e + w + nn + s));

        let q = 0.25 / (grid.dx() * grid.dy());
        // ∂x(a12 ∂y u)
        let ae = t(i + 1, j).a12 * q;
        let aw = t(i - 1, j).a12 * q;
        b.add(grid.index(i + 1, j + 1), ae)
            .add(grid.index(i + 1, j - 1), -ae)
            .add(grid.index(i - 1, j + 1), -aw)
            .add(grid.index(i - 1, j - 1), aw);
        // ∂y(a12 ∂x u)
        let an = t(i, j + 1).a12 * q;
        let as_ = t(i, j - 1).a12 * q;
        b.add(grid.index(i + 1, j + 1), an)
            .add(grid.index(i - 1, j + 1), -an)
            .add(grid.index(i + 1, j - 1), -as_)
            .add(grid.index(i - 1, j - 1), as_);
        return b.build();
    }

    let c = a.at(k);
    let tx = first_taps(i, n, grid.dx());
    let ty = first_taps(j, n, grid.dy());
    let deriv_x =
        |f: fn(&super::SymTensor) -> f64| -> f64 { tx.iter().map(|(ii, w)| w * f(&a.at(grid.index(ii, j)))).sum() };
    let deriv_y =
        |f: fn(&super::SymTensor) -> f64| -> f64 { ty.iter().map(|(jj, w)| w * f(&a.at(grid.index(i, jj)))).sum() };
    let bx = deriv_x(|t| t.a11) + deriv_y(|t| t.a12);
    let by = deriv_x(|t| t.a12) + deriv_y(|t| t.a22);

    along_x(grid, second_taps(i, n, grid.dx()), j, c.a11, &mut b);
    along_y(grid, second_taps(j, n, grid.dy()), i, c.a22, &mut b);
    along_x(grid, tx, j, bx, &mut b);
    along_y(grid, ty, i, by, &mut b);
    if c.a12 != 0.0 {
        b.add_scaled(&d_xy(grid, k), 2.0 * c.a12);
    }
    b.build()
}

/// Row of `A ∇u · ν` at the boundary node in slot `slot`.
pub fn normal_flux_row(grid: &Grid, a: &DiffusionField, slot: usize) -> Stencil {
    let node = grid.boundary()[slot];
    let flux = a.at(node.index).apply(node.normal);
    let mut b = StencilBuilder::new();
    b.add_scaled(&d_x(grid, node.index), flux[0])
        .add_scaled(&d_y(grid, node.index), flux[1]);
    b.build()
}
