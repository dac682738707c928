//! The lower-order term `F(x, s, p)` and its optional smooth truncation
//! `F_M = χ_M F`.

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// `F(x, u(x), ∇u(x))`. Evaluated node by node in no particular order, so
/// implementations must be pure.
pub trait Nonlinearity: Send + Sync {
    fn eval(&self, x: [f64; 2], s: f64, p: [f64; 2]) -> f64;
}

impl<T> Nonlinearity for T
where
    T: Fn([f64; 2], f64, [f64; 2]) -> f64 + Send + Sync,
{
    fn eval(&self, x: [f64; 2], s: f64, p: [f64; 2]) -> f64 {
        self(x, s, p)
    }
}

#[derive(Clone)]
pub struct NonlinearitySpec {
    f: Arc<dyn Nonlinearity>,
    cutoff_bound: Option<f64>,
}

impl fmt::Debug for NonlinearitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearitySpec")
            .field("cutoff_bound", &self.cutoff_bound)
            .finish_non_exhaustive()
    }
}

impl NonlinearitySpec {
    pub fn new(f: impl Nonlinearity + 'static) -> Self {
        Self {
            f: Arc::new(f),
            cutoff_bound: None,
        }
    }

    pub fn from_arc(f: Arc<dyn Nonlinearity>) -> Self {
        Self { f, cutoff_bound: None }
    }

    /// `F ≡ 0`.
    pub fn zero() -> Self {
        Self::new(|_: [f64; 2], _: f64, _: [f64; 2]| 0.0)
    }

    /// Truncates with `χ_M`.
    pub fn with_cutoff(mut self, m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidCutoff(m));
        }
        self.cutoff_bound = Some(m);
        Ok(self)
    }

    pub fn cutoff_bound(&self) -> Option<f64> {
        self.cutoff_bound
    }

    pub fn raw(&self, x: [f64; 2], s: f64, p: [f64; 2]) -> f64 {
        self.f.eval(x, s, p)
    }
}

/// `exp(-1/t)` for `t > 0`, else 0.
fn bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step from 0 (at `t ≤ 0`) to 1 (at `t ≥ 1`).
fn smooth_step(t: f64) -> f64 {
    let a = bump(t);
    let b = bump(1.0 - t);
    a / (a + b)
}

/// Smooth cutoff `χ_M(s, p)`: 1 for `|(s, p)| ≤ m`, 0 for `|(s, p)| ≥ 2m`.
pub fn chi_m(s: f64, p: [f64; 2], m: f64) -> Result<f64> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidCutoff(m));
    }
    let q = (s * s + p[0] * p[0] + p[1] * p[1]).sqrt();
    Ok(smooth_step(2.0 - q / m))
}

pub fn eval_f(spec: &NonlinearitySpec, x: [f64; 2], s: f64, p: [f64; 2]) -> Result<f64> {
    let raw = spec.raw(x, s, p);
    let v = match spec.cutoff_bound {
        None => raw,
        Some(m) => {
            let chi = chi_m(s, p, m)?;
            if chi == 0.0 {
                0.0
            } else {
                chi * raw
            }
        }
    };
    if !v.is_finite() {
        return Err(Error::NonFiniteNonlinearity { x: x[0], y: x[1] });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn cutoff_plateaus_and_midpoint() {
        let m = 2.0;
        assert_eq!(chi_m(0.0, [0.0, 0.0], m).unwrap(), 1.0);
        assert_eq!(chi_m(1.0, [1.0, 1.0], m).unwrap(), 1.0);
        assert_eq!(chi_m(2.0 * m, [0.0, 0.0], m).unwrap(), 0.0);
        assert_eq!(chi_m(0.0, [0.0, 7.0], m).unwrap(), 0.0);
        let mid = chi_m(0.0, [1.5 * m, 0.0], m).unwrap();
        assert!((mid - 0.5).abs() < 1e-15);
        let inside = chi_m(1.2 * m, [0.0, 0.0], m).unwrap();
        assert!(inside > 0.0 && inside < 1.0);
    }

    #[test]
    fn cutoff_rejects_nonpositive_bound() {
        assert!(chi_m(0.0, [0.0, 0.0], 0.0).is_err());
        assert!(NonlinearitySpec::zero().with_cutoff(-1.0).is_err());
    }

    #[test]
    fn zero_nonlinearity() {
        let z = NonlinearitySpec::zero();
        assert_eq!(eval_f(&z, [0.3, -0.2], 5.0, [1.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn untruncated_test1_integrand_vanishes_on_true_solution_gradient() {
        // F(x, s, p) = s + sqrt(|p|² + 1) - [-2π² sin θ + sin θ + sqrt(2π² cos² θ + 1)], θ = π(x + y)
        let f = NonlinearitySpec::new(|x: [f64; 2], s: f64, p: [f64; 2]| {
            let t = PI * (x[0] + x[1]);
            s + (p[0] * p[0] + p[1] * p[1] + 1.0).sqrt()
                - (-2.0 * PI * PI * t.sin() + t.sin() + (2.0 * PI * PI * t.cos().powi(2) + 1.0).sqrt())
        });
        let v = eval_f(&f, [0.0, 0.0], 0.0, [PI, PI]).unwrap();
        assert!(v.abs() < 1e-14);
        let v = eval_f(&f, [0.0, 0.0], 0.0, [0.0, 0.0]).unwrap();
        assert!((v - (1.0 - (2.0 * PI * PI + 1.0).sqrt())).abs() < 1e-14);
    }

    #[test]
    fn non_finite_value_carries_location() {
        let f = NonlinearitySpec::new(|_: [f64; 2], s: f64, _: [f64; 2]| 1.0 / s);
        match eval_f(&f, [0.25, 0.5], 0.0, [0.0, 0.0]) {
            Err(Error::NonFiniteNonlinearity { x, y }) => assert_eq!((x, y), (0.25, 0.5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cutoff_support() {
        let f = NonlinearitySpec::new(|_: [f64; 2], s: f64, p: [f64; 2]| s * s + p[0].exp())
            .with_cutoff(1.0)
            .unwrap();
        assert_eq!(eval_f(&f, [0.0, 0.0], 2.0, [0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(eval_f(&f, [0.0, 0.0], 1.5, [1.5, 0.0]).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn cutoff_is_monotone_in_radius(m in 0.1f64..10.0, a in 0.0f64..30.0, b in 0.0f64..30.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let c_lo = chi_m(lo, [0.0, 0.0], m).unwrap();
            let c_hi = chi_m(0.0, [hi, 0.0], m).unwrap();
            prop_assert!(c_hi <= c_lo);
            prop_assert!((0.0..=1.0).contains(&c_lo));
        }

        #[test]
        fn truncated_agrees_with_raw_inside_bound(
            m in 0.5f64..5.0, s in -1.0f64..1.0, p0 in -1.0f64..1.0, p1 in -1.0f64..1.0,
        ) {
            let raw = |x: [f64; 2], s: f64, p: [f64; 2]| x[0] + s * p[1] - p[0].sin();
            let plain = NonlinearitySpec::new(raw);
            let cut = NonlinearitySpec::new(raw).with_cutoff(m).unwrap();
            let scale = (m * m / 3.0).sqrt();
            let (s, p) = (s * scale, [p0 * scale, p1 * scale]);
            prop_assert_eq!(
                eval_f(&plain, [0.2, 0.1], s, p).unwrap(),
                eval_f(&cut, [0.2, 0.1], s, p).unwrap()
            );
        }

        #[test]
        fn truncated_smooth_f_has_bounded_slope(
            s1 in -10.0f64..10.0, s2 in -10.0f64..10.0, p0 in -10.0f64..10.0, p1 in -10.0f64..10.0,
        ) {
            prop_assume!((s1 - s2).abs() > 1e-6);
            let cut = NonlinearitySpec::new(|_: [f64; 2], s: f64, p: [f64; 2]| s * s - p[1].exp())
                .with_cutoff(1.0)
                .unwrap();
            let d = eval_f(&cut, [0.0, 0.0], s1, [p0, p1]).unwrap()
                - eval_f(&cut, [0.0, 0.0], s2, [p0, p1]).unwrap();
            // on |(s,p)| ≤ 2 both |∂_s F| ≤ 4 and |F| ≤ 4 + e², and χ has slope ≲ 4
            prop_assert!((d / (s1 - s2)).abs() < 100.0);
        }
    }
}
