//! Hodge decomposition of closed 1-forms on the flat torus.
//!
//! Harmonic 1-forms on the flat torus are exactly the constant-coefficient
//! forms, so the harmonic part is the grid mean of the coefficients and the
//! exact part comes from a spectral Poisson solve with the zero mode
//! removed (which is the normalization `int U omega = 0`).

use std::f64::consts::PI;

use crate::calculus::{closedness_residual, exterior_derivative, lp_norm_form};
use crate::error::{Error, Result};
use crate::grid::{HarmonicForm, OneFormField, ScalarField, TorusGrid};
use crate::{par, spectral};

/// First Betti number of `T^2`.
pub const HARMONIC_DIM: usize = 2;

/// `alpha = dU + H` with `U` mean-zero and `H` harmonic.
#[derive(Debug, Clone, PartialEq)]
pub struct HodgeDecomposition {
    pub u: ScalarField,
    pub h: HarmonicForm,
    /// `|alpha - dU - H|_inf`.
    pub residual: f64,
}

/// Mean taken relative to the first node, so constant fields (harmonic
/// forms) are returned exactly and projection is idempotent bit for bit.
fn shifted_mean(v: &[f64]) -> f64 {
    let v0 = v[0];
    let dev: Vec<f64> = v.iter().map(|x| x - v0).collect();
    v0 + par::sum(&dev) / v.len() as f64
}

/// Coefficients of the harmonic projection.
pub fn harmonic_part(alpha: &OneFormField) -> HarmonicForm {
    HarmonicForm::new(shifted_mean(&alpha.a), shifted_mean(&alpha.b))
}

/// `P_harm(alpha)` as a (constant) field.
pub fn harmonic_projection(alpha: &OneFormField) -> OneFormField {
    harmonic_part(alpha).to_field(alpha.grid)
}

pub fn hodge_decompose(alpha: &OneFormField, tol: f64) -> Result<HodgeDecomposition> {
    if !alpha.is_finite() {
        return Err(Error::NonFiniteField);
    }
    let residual = closedness_residual(alpha);
    if residual > tol {
        return Err(Error::NotClosed { residual, tol });
    }
    Ok(decompose_unchecked(alpha))
}

/// Decomposition without the closedness gate. For non-closed input the
/// co-exact remainder shows up in `residual`.
pub fn decompose_unchecked(alpha: &OneFormField) -> HodgeDecomposition {
    let grid = alpha.grid;
    let h = harmonic_part(alpha);
    let a: Vec<f64> = alpha.a.iter().map(|v| v - h.a).collect();
    let b: Vec<f64> = alpha.b.iter().map(|v| v - h.b).collect();
    let u = ScalarField {
        grid,
        values: spectral::potential(&a, &b, grid.n()),
    }
    .normalized();
    let du = exterior_derivative(&u);
    let residual = a
        .iter()
        .zip(&du.a)
        .chain(b.iter().zip(&du.b))
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    HodgeDecomposition { u, h, residual }
}

/// Discrete `L^2` inner product of two 1-forms on the unit-area torus.
pub fn l2_inner(alpha: &OneFormField, beta: &OneFormField) -> f64 {
    let prods: Vec<f64> = (0..alpha.a.len())
        .map(|k| alpha.a[k] * beta.a[k] + alpha.b[k] * beta.b[k])
        .collect();
    par::sum(&prods) / prods.len() as f64
}

/// Ratio bounds `(max, min)` of `|H|_0 / |H|_{L^2}` over the given forms.
pub fn norm_ratio_bounds(grid: TorusGrid, forms: &[HarmonicForm]) -> Result<(f64, f64)> {
    if forms.is_empty() {
        return Err(Error::InvalidArgument("no sample forms".into()));
    }
    let mut l0 = f64::NEG_INFINITY;
    let mut l1 = f64::INFINITY;
    for h in forms {
        let field = h.to_field(grid);
        let l2 = lp_norm_form(&field, 2.0)?;
        if l2 == 0.0 {
            return Err(Error::InvalidArgument("zero sample form".into()));
        }
        let ratio = lp_norm_form(&field, f64::INFINITY)? / l2;
        l0 = l0.max(ratio);
        l1 = l1.min(ratio);
    }
    Ok((l0, l1))
}

/// Equivalence constants `(L0, L1)` with
/// `L1 |H|_{L^2} <= |H|_0 <= L0 |H|_{L^2}` on harmonic forms, estimated
/// from `sample_count` equally spaced directions on the unit circle.
pub fn norm_equivalence_constants(grid: TorusGrid, sample_count: usize) -> Result<(f64, f64)> {
    if sample_count < 8 {
        return Err(Error::InvalidArgument(format!(
            "sample_count must be >= 8, got {sample_count}"
        )));
    }
    let forms: Vec<HarmonicForm> = (0..sample_count)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / sample_count as f64;
            HarmonicForm::new(th.cos(), th.sin())
        })
        .collect();
    norm_ratio_bounds(grid, &forms)
}

/// Constants for a flat torus of total area `area`: the `L^2` norm of a
/// constant form picks up `sqrt(area)`, so `L0 = L1 = area^{-1/2}`.
pub fn flat_constants_for_area(area: f64) -> (f64, f64) {
    let c = area.sqrt().recip();
    (c, c)
}
