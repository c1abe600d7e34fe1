//! The family `Z_{s,t} = t X_s - 2s int_0^t X_u du`, its flow `G_{s,t}` in
//! `s`, the `t`-velocity `V_{s,t}` of `G`, and the bounds built from them.

use serde::{Deserialize, Serialize};

use crate::calculus::oscillation;
use crate::error::{Error, Result};
use crate::fd;
use crate::functionals::vf_hoferlike_norm;
use crate::grid::{Displacement, ScalarField, TorusGrid, VectorFieldField};
use crate::interp::Interpolation;
use crate::isotopy::{eulerian_velocity, integrate_flow, DiffeoPath, GeneratorFlow, PathSource};
use crate::spectral;

/// Safety factor applied to the grid estimates of `N` and `K`.
pub const GRONWALL_MARGIN: f64 = 1.1;
pub const GRONWALL_SLACK: f64 = 1e-6;
pub const OSC_SLACK: f64 = 1e-6;

/// `Z`, and once computed `G` and `V`, on an `(M + 1) x (M + 1)` grid of
/// `(s, t)` samples shared with the input family `X`.
#[derive(Debug, Clone)]
pub struct TwoParamFamily {
    grid: TorusGrid,
    x: Vec<VectorFieldField>,
    z: Vec<Vec<VectorFieldField>>,
    g: Option<Vec<Vec<Displacement>>>,
    v: Option<Vec<Vec<VectorFieldField>>>,
    n_hat: f64,
    k_hat: f64,
}

fn point_norm(vx: f64, vy: f64) -> f64 {
    vx.hypot(vy)
}

fn field_sup(f: &VectorFieldField) -> f64 {
    f.vx.iter()
        .zip(&f.vy)
        .fold(0.0, |m, (a, b)| m.max(point_norm(*a, *b)))
}

/// Largest singular value of `[[a, b], [c, d]]`.
fn op_norm(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let s = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    (0.5 * (s + (s * s - 4.0 * det * det).max(0.0).sqrt())).sqrt()
}

/// `Z` from `X` sampled at `M + 1` uniform times (trapezoid for the
/// running integral), together with grid estimates of
/// `N = sup |dZ/dt|` and `K = sup |DZ|_op`.
pub fn build_z(x: &[VectorFieldField]) -> Result<TwoParamFamily> {
    if x.len() < 5 {
        return Err(Error::InvalidArgument(
            "family needs at least 4 time intervals".into(),
        ));
    }
    let grid = x[0].grid;
    if x.iter().any(|f| f.grid != grid) {
        return Err(Error::Mismatch("family fields on different grids".into()));
    }
    if x.iter().any(|f| !f.is_finite()) {
        return Err(Error::NonFiniteField);
    }
    let m = x.len() - 1;
    let dt = 1.0 / m as f64;
    let len = grid.len();
    // running integral int_0^t X_u du
    let mut integral = vec![VectorFieldField::zeros(grid)];
    for k in 1..=m {
        let prev = &integral[k - 1];
        let mut next = prev.clone();
        for i in 0..len {
            next.vx[i] += 0.5 * dt * (x[k - 1].vx[i] + x[k].vx[i]);
            next.vy[i] += 0.5 * dt * (x[k - 1].vy[i] + x[k].vy[i]);
        }
        integral.push(next);
    }
    let z: Vec<Vec<VectorFieldField>> = (0..=m)
        .map(|si| {
            let s = si as f64 * dt;
            (0..=m)
                .map(|ti| {
                    let t = ti as f64 * dt;
                    VectorFieldField {
                        grid,
                        vx: (0..len)
                            .map(|i| t * x[si].vx[i] - 2.0 * s * integral[ti].vx[i])
                            .collect(),
                        vy: (0..len)
                            .map(|i| t * x[si].vy[i] - 2.0 * s * integral[ti].vy[i])
                            .collect(),
                    }
                })
                .collect()
        })
        .collect();
    let mut n_hat = 0.0f64;
    let mut k_hat = 0.0f64;
    for row in &z {
        let vx: Vec<&[f64]> = row.iter().map(|f| &f.vx[..]).collect();
        let vy: Vec<&[f64]> = row.iter().map(|f| &f.vy[..]).collect();
        for ti in 0..=m {
            let dx = fd::derivative(&vx, ti, dt);
            let dy = fd::derivative(&vy, ti, dt);
            n_hat = dx
                .iter()
                .zip(&dy)
                .fold(n_hat, |acc, (a, b)| acc.max(point_norm(*a, *b)));
            let (a, b) = spectral::gradient(&row[ti].vx, grid.n());
            let (c, d) = spectral::gradient(&row[ti].vy, grid.n());
            for i in 0..len {
                k_hat = k_hat.max(op_norm(a[i], b[i], c[i], d[i]));
            }
        }
    }
    Ok(TwoParamFamily {
        grid,
        x: x.to_vec(),
        z,
        g: None,
        v: None,
        n_hat,
        k_hat,
    })
}

impl TwoParamFamily {
    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    /// Number of intervals `M` in both `s` and `t`.
    pub fn samples(&self) -> usize {
        self.z.len() - 1
    }

    pub fn z(&self, s: usize, t: usize) -> &VectorFieldField {
        &self.z[s][t]
    }

    pub fn g(&self, s: usize, t: usize) -> Option<&Displacement> {
        self.g.as_ref().map(|g| &g[s][t])
    }

    pub fn v(&self, s: usize, t: usize) -> Option<&VectorFieldField> {
        self.v.as_ref().map(|v| &v[s][t])
    }

    pub fn n_hat(&self) -> f64 {
        self.n_hat
    }

    pub fn k_hat(&self) -> f64 {
        self.k_hat
    }

    /// Integrate `dG/ds = Z_{s,t}(G)` from the identity for every `t`.
    pub fn flow_in_s(&mut self, substeps: usize) -> Result<()> {
        let m = self.samples();
        let mut g = vec![Vec::with_capacity(m + 1); m + 1];
        for ti in 0..=m {
            let column: Vec<VectorFieldField> = (0..=m).map(|si| self.z[si][ti].clone()).collect();
            let flow = GeneratorFlow::from_fields(&column, Interpolation::Cubic)?;
            let path = integrate_flow(&flow, self.grid, m, substeps)?;
            for (si, d) in path.displacements().iter().enumerate() {
                g[si].push(d.clone());
            }
        }
        self.g = Some(g);
        Ok(())
    }

    /// `V_{s,t} = (dG_{s,t}/dt) o G_{s,t}^{-1}`.
    pub fn extract_v(&mut self) -> Result<()> {
        let g = self
            .g
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("flow in s has not been computed".into()))?;
        let m = self.samples();
        let mut v = Vec::with_capacity(m + 1);
        for row in g {
            let path = DiffeoPath::new(row.clone(), PathSource::Sampled)?;
            v.push(
                (0..=m)
                    .map(|ti| eulerian_velocity(&path, ti))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        self.v = Some(v);
        Ok(())
    }

    fn v_rows(&self) -> Result<&Vec<Vec<VectorFieldField>>> {
        self.v
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("V has not been extracted".into()))
    }

    /// `sup_{s,t,x} |V_{s,t}(x)|`.
    pub fn sup_v(&self) -> Result<f64> {
        Ok(self
            .v_rows()?
            .iter()
            .flatten()
            .fold(0.0, |m, f| m.max(field_sup(f))))
    }

    /// `sup_t |X_t|_HL`.
    pub fn sup_x_hl(&self, tol: f64) -> Result<f64> {
        self.x
            .iter()
            .map(|f| vf_hoferlike_norm(f, tol))
            .try_fold(0.0f64, |m, v| Ok(m.max(v?)))
    }
}

/// `(N/K)(e^{K s} - 1)`, or its limit `N s` when `K = 0`; the flag marks
/// the limit case.
pub fn gronwall_bound(n: f64, k: f64, s: f64) -> (f64, bool) {
    if k <= 1e-12 {
        (n * s, true)
    } else {
        (n / k * (k * s).exp_m1(), false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GronwallReport {
    pub sup_v: f64,
    pub n_hat: f64,
    pub k_hat: f64,
    pub bound: f64,
    /// The `K = 0` limit formula was used.
    pub limit_case: bool,
    pub pass: bool,
}

pub fn gronwall_check(fam: &TwoParamFamily) -> Result<GronwallReport> {
    let sup_v = fam.sup_v()?;
    let (bound, limit_case) = gronwall_bound(
        GRONWALL_MARGIN * fam.n_hat,
        GRONWALL_MARGIN * fam.k_hat,
        1.0,
    );
    Ok(GronwallReport {
        sup_v,
        n_hat: fam.n_hat,
        k_hat: fam.k_hat,
        bound,
        limit_case,
        pass: sup_v <= bound + GRONWALL_SLACK,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub raw: ScalarField,
    pub normalized: ScalarField,
}

/// `int_0^u omega(Z_{s,t}, V_{s,t}) ds` at time sample `t`, trapezoid in
/// `s` with a linear partial last interval when `u` falls between samples.
pub fn correction_hamiltonian(fam: &TwoParamFamily, u: f64, t: usize) -> Result<Correction> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidArgument(format!(
            "u must lie in [0, 1], got {u}"
        )));
    }
    let v = fam.v_rows()?;
    let m = fam.samples();
    if t > m {
        return Err(Error::InvalidArgument(format!(
            "time index {t} out of range"
        )));
    }
    let ds = 1.0 / m as f64;
    let len = fam.grid.len();
    let integrand = |si: usize| -> Vec<f64> {
        let z = &fam.z[si][t];
        let w = &v[si][t];
        (0..len)
            .map(|i| z.vx[i] * w.vy[i] - z.vy[i] * w.vx[i])
            .collect()
    };
    let mut acc = vec![0.0; len];
    let pos = u * m as f64;
    let whole = (pos.floor() as usize).min(m);
    let mut prev = integrand(0);
    for si in 1..=whole {
        let cur = integrand(si);
        for i in 0..len {
            acc[i] += 0.5 * ds * (prev[i] + cur[i]);
        }
        prev = cur;
    }
    let frac = pos - whole as f64;
    if frac > 0.0 && whole < m {
        let next = integrand(whole + 1);
        let h = frac * ds;
        for i in 0..len {
            let end = prev[i] + frac * (next[i] - prev[i]);
            acc[i] += 0.5 * h * (prev[i] + end);
        }
    }
    let raw = ScalarField {
        grid: fam.grid,
        values: acc,
    };
    let normalized = raw.normalized();
    Ok(Correction { raw, normalized })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscReport {
    /// Largest oscillation of the correction over time samples.
    pub osc: f64,
    pub sup_v: f64,
    pub sup_x_hl: f64,
    pub l0: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `osc <= 4 L0 sup|V| sup|X|_HL`, checked at every time sample.
pub fn osc_bound_check(
    fam: &TwoParamFamily,
    u: f64,
    l0: f64,
    closed_tol: f64,
) -> Result<OscReport> {
    let mut osc = 0.0f64;
    for t in 0..=fam.samples() {
        osc = osc.max(oscillation(&correction_hamiltonian(fam, u, t)?.raw)?);
    }
    let sup_v = fam.sup_v()?;
    let sup_x_hl = fam.sup_x_hl(closed_tol)?;
    let bound = 4.0 * l0 * sup_v * sup_x_hl;
    Ok(OscReport {
        osc,
        sup_v,
        sup_x_hl,
        l0,
        bound,
        pass: osc <= bound + OSC_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn constant_family(grid: TorusGrid, m: usize, vx: f64, vy: f64) -> Vec<VectorFieldField> {
        vec![VectorFieldField::constant(grid, vx, vy); m + 1]
    }

    fn full(x: &[VectorFieldField]) -> TwoParamFamily {
        let mut fam = build_z(x).unwrap();
        fam.flow_in_s(2).unwrap();
        fam.extract_v().unwrap();
        fam
    }

    #[test]
    fn zero_family() {
        let grid = TorusGrid::new(16).unwrap();
        let fam = full(&constant_family(grid, 8, 0.0, 0.0));
        assert_eq!(fam.sup_v().unwrap(), 0.0);
        assert!(fam.g(5, 3).unwrap().max_abs() == 0.0);
        let r = gronwall_check(&fam).unwrap();
        assert!(r.pass && r.limit_case);
        let c = correction_hamiltonian(&fam, 1.0, 4).unwrap();
        assert_eq!(c.raw.max_abs(), 0.0);
        assert!(osc_bound_check(&fam, 1.0, 1.0, 1e-6).unwrap().pass);
    }

    #[test]
    fn constant_family_closed_forms() {
        let grid = TorusGrid::new(16).unwrap();
        let m = 16;
        let fam = full(&constant_family(grid, m, 0.6, -0.8));
        for si in 0..=m {
            let s = si as f64 / m as f64;
            for ti in [0, 5, m] {
                let t = ti as f64 / m as f64;
                let z = fam.z(si, ti);
                assert!((z.vx[3] - t * (1.0 - 2.0 * s) * 0.6).abs() < 1e-14);
                let g = fam.g(si, ti).unwrap();
                assert!((g.dx[7] - t * (s - s * s) * 0.6).abs() < 1e-13);
                let v = fam.v(si, ti).unwrap();
                assert!((v.vy[11] + (s - s * s) * 0.8).abs() < 1e-12);
            }
        }
        assert!((fam.sup_v().unwrap() - 0.25).abs() < 1e-12);
        let r = gronwall_check(&fam).unwrap();
        assert!(r.pass && r.limit_case, "{r:?}");
        let c = correction_hamiltonian(&fam, 1.0, m).unwrap();
        assert!(c.raw.max_abs() < 1e-13);
    }

    #[test]
    fn gronwall_formula() {
        let (b, lim) = gronwall_bound(1.0, 1.0, 1.0);
        assert!((b - (1f64.exp() - 1.0)).abs() < 1e-15 && !lim);
        assert_eq!(gronwall_bound(2.0, 0.0, 0.5), (1.0, true));
    }

    #[test]
    fn rotating_harmonic_family() {
        let grid = TorusGrid::new(64).unwrap();
        let m = 32;
        let x: Vec<VectorFieldField> = (0..=m)
            .map(|k| {
                let t = k as f64 / m as f64;
                VectorFieldField::constant(grid, (PI * t).cos(), (PI * t).sin())
            })
            .collect();
        let fam = full(&x);
        assert!(gronwall_check(&fam).unwrap().pass);
        let r = osc_bound_check(&fam, 1.0, 1.0, 1e-6).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.sup_x_hl - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_family_is_nontrivial() {
        let grid = TorusGrid::new(32).unwrap();
        let m = 16;
        // X_t = sharp d(a(t) sin 2 pi x)
        let x: Vec<VectorFieldField> = (0..=m)
            .map(|k| {
                let a = 0.05 * (1.0 + k as f64 / m as f64);
                VectorFieldField::from_fn(grid, |x, _| (0.0, -2.0 * PI * a * (2.0 * PI * x).cos()))
            })
            .collect();
        let fam = full(&x);
        assert!(fam.k_hat() > 0.0);
        let r = gronwall_check(&fam).unwrap();
        assert!(r.pass && !r.limit_case, "{r:?}");
        assert!(osc_bound_check(&fam, 1.0, 1.0, 1e-6).unwrap().pass);
    }
}
