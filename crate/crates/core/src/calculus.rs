//! Discrete calculus on the flat torus: oscillation, norms of 1-forms,
//! contraction with `omega = dx ^ dy`, exterior derivative, pullback.

use crate::error::{Error, Result};
use crate::grid::{Displacement, OneFormField, ScalarField, TorusGrid, VectorFieldField};
use crate::interp::{Interpolation, Stencil};
use crate::{par, spectral};

/// Default tolerance for calling a discrete 1-form closed at resolution `N`.
pub fn default_closed_tolerance(grid: TorusGrid) -> f64 {
    1e-6 * grid.n() as f64
}

/// `max f - min f` over the nodes.
pub fn oscillation(f: &ScalarField) -> Result<f64> {
    if !f.is_finite() {
        return Err(Error::NonFiniteField);
    }
    Ok(par::max(&f.values) - par::min(&f.values))
}

/// Validate an `L^p` exponent (`p >= 1` or `+inf`).
pub fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// `L^p` norm of the pointwise flat norm over the unit-area torus
/// (midpoint rule, weight `h^2`); `p = inf` gives the sup over nodes.
pub fn lp_norm_form(alpha: &OneFormField, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Ok(alpha.sup_norm());
    }
    let pointwise: Vec<f64> = alpha
        .a
        .iter()
        .zip(&alpha.b)
        .map(|(a, b)| a.hypot(*b).powf(p))
        .collect();
    let mean = par::sum(&pointwise) / pointwise.len() as f64;
    Ok(mean.powf(1.0 / p))
}

/// `iota_X omega = vx dy - vy dx`.
pub fn contract_with_omega(x: &VectorFieldField) -> OneFormField {
    OneFormField {
        grid: x.grid,
        a: x.vy.iter().map(|v| -v).collect(),
        b: x.vx.clone(),
    }
}

/// Inverse of [`contract_with_omega`]: the field `X` with `iota_X omega = alpha`.
pub fn sharp_omega(alpha: &OneFormField) -> VectorFieldField {
    VectorFieldField {
        grid: alpha.grid,
        vx: alpha.b.clone(),
        vy: alpha.a.iter().map(|v| -v).collect(),
    }
}

/// Spectral `df`.
pub fn exterior_derivative(f: &ScalarField) -> OneFormField {
    let (a, b) = spectral::gradient(&f.values, f.grid.n());
    OneFormField { grid: f.grid, a, b }
}

/// Sup norm of `d alpha`, i.e. of `d/dx b - d/dy a`.
pub fn closedness_residual(alpha: &OneFormField) -> f64 {
    spectral::curl(&alpha.a, &alpha.b, alpha.grid.n())
        .iter()
        .fold(0.0, |m, v| m.max(v.abs()))
}

/// Jacobian entries `[d1 phi_x, d2 phi_x, d1 phi_y, d2 phi_y]` of
/// `phi = Id + D`, by spectral differentiation of the periodic displacement.
pub fn jacobian(phi: &Displacement) -> [Vec<f64>; 4] {
    let n = phi.grid.n();
    let (dxx, dxy) = spectral::gradient(&phi.dx, n);
    let (dyx, dyy) = spectral::gradient(&phi.dy, n);
    [
        dxx.into_iter().map(|v| 1.0 + v).collect(),
        dxy,
        dyx,
        dyy.into_iter().map(|v| 1.0 + v).collect(),
    ]
}

/// `(phi^* alpha)_p(v) = alpha_{phi(p)}(D phi_p v)`, with `alpha` evaluated
/// off-grid by the given interpolation scheme.
pub fn pullback_oneform(
    phi: &Displacement,
    alpha: &OneFormField,
    scheme: Interpolation,
) -> Result<OneFormField> {
    if phi.grid != alpha.grid {
        return Err(Error::Mismatch("pullback grids differ".into()));
    }
    if !phi.is_finite() {
        return Err(Error::NonFiniteField);
    }
    let grid = phi.grid;
    let [j11, j12, j21, j22] = jacobian(phi);
    let comps = par::map_range(grid.len(), |k| {
        let (x, y) = phi.image(k);
        let (a, b) = Stencil::new(grid, scheme, x, y).apply2(&alpha.a, &alpha.b);
        (a * j11[k] + b * j21[k], a * j12[k] + b * j22[k])
    });
    let (a, b) = comps.into_iter().unzip();
    Ok(OneFormField { grid, a, b })
}

/// `f o phi` by interpolation.
pub fn compose_scalar(f: &ScalarField, phi: &Displacement, scheme: Interpolation) -> ScalarField {
    let grid = f.grid;
    let values = par::map_range(grid.len(), |k| {
        let (x, y) = phi.image(k);
        Stencil::new(grid, scheme, x, y).apply(&f.values)
    });
    ScalarField { grid, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn g(n: usize) -> TorusGrid {
        TorusGrid::new(n).unwrap()
    }

    #[test]
    fn oscillation_examples() {
        assert_eq!(
            oscillation(&ScalarField::constant(g(16), 5.0)).unwrap(),
            0.0
        );
        let f = ScalarField::from_fn(g(32), |x, _| (2.0 * PI * x).sin());
        assert!((oscillation(&f).unwrap() - 2.0).abs() < 1e-15);
        let f = ScalarField::from_fn(g(64), |_, y| (2.0 * PI * y).cos());
        assert!((oscillation(&f).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn oscillation_rejects_nan() {
        let mut f = ScalarField::zeros(g(8));
        f.values[3] = f64::NAN;
        assert_eq!(oscillation(&f), Err(Error::NonFiniteField));
    }

    #[test]
    fn lp_norm_examples() {
        let grid = g(16);
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert!(
                (lp_norm_form(&OneFormField::constant(grid, 1.0, 0.0), p).unwrap() - 1.0).abs()
                    < 1e-14
            );
        }
        let three = OneFormField::constant(grid, 3.0, 0.0);
        assert!((lp_norm_form(&three, 2.0).unwrap() - 3.0).abs() < 1e-14);
        let diag = OneFormField::constant(grid, 1.0, 1.0);
        assert!((lp_norm_form(&diag, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(lp_norm_form(&diag, 0.5), Err(Error::InvalidExponent(0.5)));
    }

    #[test]
    fn contraction_examples() {
        let grid = g(8);
        let dy = contract_with_omega(&VectorFieldField::constant(grid, 1.0, 0.0));
        assert_eq!((dy.a[0], dy.b[0]), (0.0, 1.0));
        let mdx = contract_with_omega(&VectorFieldField::constant(grid, 0.0, 1.0));
        assert_eq!((mdx.a[0], mdx.b[0]), (-1.0, 0.0));
        // n d/dx + m d/dy -> n dy - m dx
        let (n, m) = (2.0, -3.0);
        let f = contract_with_omega(&VectorFieldField::constant(grid, n, m));
        assert_eq!((f.a[0], f.b[0]), (-m, n));
        let back = sharp_omega(&f);
        assert_eq!((back.vx[0], back.vy[0]), (n, m));
    }

    #[test]
    fn exterior_derivative_examples() {
        let grid = g(64);
        let zero = exterior_derivative(&ScalarField::constant(grid, 2.5));
        assert!(zero.sup_norm() < 1e-13);
        let d = exterior_derivative(&ScalarField::from_fn(grid, |x, _| (2.0 * PI * x).sin()));
        let exact = OneFormField::from_fn(grid, |x, _| (2.0 * PI * (2.0 * PI * x).cos(), 0.0));
        assert!(d.max_abs_diff(&exact) <= 1e-10);
        let d = exterior_derivative(&ScalarField::from_fn(grid, |x, y| {
            (2.0 * PI * x).sin() * (2.0 * PI * y).sin()
        }));
        let exact = OneFormField::from_fn(grid, |x, y| {
            (
                2.0 * PI * (2.0 * PI * x).cos() * (2.0 * PI * y).sin(),
                2.0 * PI * (2.0 * PI * x).sin() * (2.0 * PI * y).cos(),
            )
        });
        assert!(d.max_abs_diff(&exact) <= 1e-10);
    }

    #[test]
    fn closedness_examples() {
        let grid = g(64);
        assert_eq!(
            closedness_residual(&OneFormField::constant(grid, 1.0, 0.0)),
            0.0
        );
        let exact = exterior_derivative(&ScalarField::from_fn(grid, |x, _| (2.0 * PI * x).sin()));
        assert!(closedness_residual(&exact) <= 1e-10);
        // x dy with x made periodic by a sawtooth: the jump of b at x = 0
        // shows up as a spike in the spectral derivative that grows with N.
        // Oracle: the same derivative by an explicit O(N^2) DFT of one row.
        let direct = |n: usize| {
            let f: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
            let k = |m: usize| {
                if 2 * m < n {
                    m as f64
                } else if 2 * m == n {
                    0.0
                } else {
                    m as f64 - n as f64
                }
            };
            (0..n)
                .map(|i| {
                    let mut acc = 0.0;
                    for m in 0..n {
                        let (mut re, mut im) = (0.0, 0.0);
                        for (l, fl) in f.iter().enumerate() {
                            let th = -2.0 * PI * (m * l) as f64 / n as f64;
                            re += fl * th.cos();
                            im += fl * th.sin();
                        }
                        // (i 2 pi k) F_m e^{2 pi i m i / N}, real part
                        let ph = 2.0 * PI * (m * i) as f64 / n as f64;
                        let w = 2.0 * PI * k(m);
                        acc += -w * (im * ph.cos() + re * ph.sin());
                    }
                    (acc / n as f64).abs()
                })
                .fold(0.0, f64::max)
        };
        let saw = |n: usize| closedness_residual(&OneFormField::from_fn(g(n), |x, _| (0.0, x)));
        for n in [16, 64] {
            let (r, o) = (saw(n), direct(n));
            assert!((r - o).abs() <= 1e-9 * o, "n={n}: {r} vs {o}");
            assert!(r > default_closed_tolerance(g(n)));
        }
        assert!(saw(128) > 1.8 * saw(64));
    }

    #[test]
    fn pullback_examples() {
        let grid = g(128);
        let alpha = OneFormField::from_fn(grid, |x, y| {
            ((2.0 * PI * y).cos(), 0.5 * (2.0 * PI * x).sin())
        });
        let id =
            pullback_oneform(&Displacement::identity(grid), &alpha, Interpolation::Cubic).unwrap();
        assert!(id.max_abs_diff(&alpha) <= 1e-14);

        let c = OneFormField::constant(grid, 0.7, -1.2);
        let tr = pullback_oneform(
            &Displacement::translation(grid, 0.31, 0.17),
            &c,
            Interpolation::Bilinear,
        )
        .unwrap();
        assert!(tr.max_abs_diff(&c) <= 1e-14);

        let shear = Displacement::from_fn(grid, |_, y| (0.3 * (2.0 * PI * y).sin(), 0.0));
        let dx = OneFormField::constant(grid, 1.0, 0.0);
        let pb = pullback_oneform(&shear, &dx, Interpolation::Bilinear).unwrap();
        let exact = OneFormField::from_fn(grid, |_, y| (1.0, 0.6 * PI * (2.0 * PI * y).cos()));
        assert!(pb.max_abs_diff(&exact) <= 1e-6);
    }
}
