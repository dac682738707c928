//! Carleman-contraction solver for quasi-linear elliptic equations with
//! Cauchy boundary data.
//!
//! The solution of
//!
//! ```text
//! Div(A ∇u) + F(x, u, ∇u) = 0 in Ω,   u = f and A∇u·ν = g on ∂Ω
//! ```
//!
//! is computed as the fixed point of a map `Φ`: given an iterate `u`, `Φ(u)`
//! is the minimizer of a Carleman-weighted, regularized least-squares
//! functional for the *linear* problem with `F` frozen at `u`. The iteration
//! `u_{n+1} = Φ(u_n)` starts from the solution of the linear problem with `F`
//! removed and stops once successive iterates differ by less than `κ₀` in `L²`.
//!
//! Modules:
//! - [`grid_fd`]: tensor grid and finite-difference operators.
//! - [`weight`]: Carleman weight and the weighted `H¹` norm.
//! - [`nonlinearity`]: the `F(x, s, p)` contract and its smooth cutoff.
//! - [`qrm`]: one quasi-reversibility solve (assembly and linear backends).
//! - [`driver`]: the outer fixed-point loop and its trace.
//! - [`problems`]: the four bundled manufactured tests and the noise model.

pub mod driver;
pub mod error;
pub mod grid_fd;
pub mod nonlinearity;
pub mod problems;
pub mod qrm;
pub mod weight;

pub use error::{Error, Result};
