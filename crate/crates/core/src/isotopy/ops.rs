use super::{DiffeoPath, GeneratorPath, PathSource};
use crate::calculus::jacobian;
use crate::error::{Error, Result};
use crate::grid::{Displacement, HarmonicForm, ScalarField};
use crate::interp::{Interpolation, Stencil};
use crate::par;

/// Default plateau width of the concatenation reparametrization.
pub const DEFAULT_DELTA: f64 = 0.1;

const NEWTON_ITERATIONS: usize = 50;

#[inline]
fn smoothstep(u: f64) -> f64 {
    u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
}

#[inline]
fn smoothstep_rate(u: f64) -> f64 {
    30.0 * u * u * (1.0 - u) * (1.0 - u)
}

/// Nondecreasing plateau function: 0 on `[0, delta]`, 1 on `[1 - delta, 1]`,
/// quintic smoothstep in between.
pub fn plateau(s: f64, delta: f64) -> f64 {
    let u = ((s - delta) / (1.0 - 2.0 * delta)).clamp(0.0, 1.0);
    smoothstep(u)
}

/// Derivative of [`plateau`] in `s`.
pub fn plateau_rate(s: f64, delta: f64) -> f64 {
    let u = (s - delta) / (1.0 - 2.0 * delta);
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        smoothstep_rate(u) / (1.0 - 2.0 * delta)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1/2), got {delta}"
        )));
    }
    Ok(())
}

/// Inverse map by damped Newton iteration at every node, with `D` and its
/// spectral Jacobian evaluated off-grid by cubic interpolation. Returns the
/// displacement `E` of `phi^{-1} = Id + E`.
pub fn invert_diffeo(d: &Displacement, tol: f64) -> Result<Displacement> {
    if !d.is_finite() {
        return Err(Error::NonFiniteField);
    }
    let grid = d.grid;
    let [j11, j12, j21, j22] = jacobian(d);
    let solved = par::map_range(grid.len(), |idx| -> std::result::Result<(f64, f64), f64> {
        let (x, y) = grid.coords(idx);
        let residual = |px: f64, py: f64| {
            let st = Stencil::new(grid, Interpolation::Cubic, px, py);
            let (ex, ey) = st.apply2(&d.dx, &d.dy);
            (st, px + ex - x, py + ey - y)
        };
        let (mut px, mut py) = (x - d.dx[idx], y - d.dy[idx]);
        let (mut st, mut rx, mut ry) = residual(px, py);
        let mut res = rx.abs().max(ry.abs());
        for _ in 0..NEWTON_ITERATIONS {
            if res <= tol {
                return Ok((px - x, py - y));
            }
            let (a, b) = st.apply2(&j11, &j12);
            let (c, e) = st.apply2(&j21, &j22);
            let det = a * e - b * c;
            if !(det > 1e-12) {
                return Err(res);
            }
            let (sx, sy) = ((e * rx - b * ry) / det, (a * ry - c * rx) / det);
            // backtrack until the residual drops; far from the root a full
            // step can overshoot on strongly sheared maps
            let mut lambda = 1.0;
            loop {
                let (qx, qy) = (px - lambda * sx, py - lambda * sy);
                let (qs, qrx, qry) = residual(qx, qy);
                let qres = qrx.abs().max(qry.abs());
                if qres < res || lambda < 1e-3 {
                    (px, py, st, rx, ry, res) = (qx, qy, qs, qrx, qry, qres);
                    break;
                }
                lambda *= 0.5;
            }
        }
        if res <= tol {
            return Ok((px - x, py - y));
        }
        Err(res)
    });
    let mut out = Displacement::identity(grid);
    for (node, r) in solved.into_iter().enumerate() {
        match r {
            Ok((ex, ey)) => {
                out.dx[node] = ex;
                out.dy[node] = ey;
            }
            Err(residual) => return Err(Error::NotInvertible { node, residual }),
        }
    }
    Ok(out)
}

/// `psi o phi`, i.e. `D = D_phi + D_psi(phi(x))`.
pub fn compose_maps(psi: &Displacement, phi: &Displacement) -> Result<Displacement> {
    if psi.grid != phi.grid {
        return Err(Error::Mismatch(
            "composed maps live on different grids".into(),
        ));
    }
    let grid = phi.grid;
    // translations: interpolating a constant field is the identity
    let (cx, cy) = (psi.dx[0], psi.dy[0]);
    if psi.dx.iter().all(|&v| v == cx) && psi.dy.iter().all(|&v| v == cy) {
        return Ok(Displacement {
            grid,
            dx: phi.dx.iter().map(|v| v + cx).collect(),
            dy: phi.dy.iter().map(|v| v + cy).collect(),
        });
    }
    let vals = par::map_range(grid.len(), |k| {
        let (x, y) = phi.image(k);
        let (a, b) = Stencil::new(grid, Interpolation::Cubic, x, y).apply2(&psi.dx, &psi.dy);
        (phi.dx[k] + a, phi.dy[k] + b)
    });
    let (dx, dy) = vals.into_iter().unzip();
    Ok(Displacement { grid, dx, dy })
}

fn same_sampling(a: &DiffeoPath, b: &DiffeoPath) -> Result<()> {
    if a.grid() != b.grid() || a.samples() != b.samples() {
        return Err(Error::Mismatch("paths have different sampling".into()));
    }
    Ok(())
}

/// Pointwise composition `(Psi o Phi)_t = psi_t o phi_t`.
pub fn compose_paths(psi: &DiffeoPath, phi: &DiffeoPath) -> Result<DiffeoPath> {
    same_sampling(psi, phi)?;
    let disp = (0..=phi.samples())
        .map(|k| compose_maps(psi.at(k), phi.at(k)))
        .collect::<Result<Vec<_>>>()?;
    DiffeoPath::new(disp, PathSource::Composed)
}

/// `Psi *_l Phi`: `phi_{lambda(t)}` on `[0, 1/2]`, then
/// `psi_{tau(t)} o phi_1` on `[1/2, 1]`, with `lambda(t) = f(2t)` and
/// `tau(t) = f(2t - 1)`. The result carries `samples` time intervals.
pub fn concatenate_left(
    psi: &DiffeoPath,
    phi: &DiffeoPath,
    delta: f64,
    samples: usize,
) -> Result<DiffeoPath> {
    check_delta(delta)?;
    if psi.grid() != phi.grid() {
        return Err(Error::Mismatch(
            "concatenated paths live on different grids".into(),
        ));
    }
    if !samples.is_multiple_of(2) {
        return Err(Error::InvalidArgument(
            "concatenation needs an even sample count".into(),
        ));
    }
    let end = phi.endpoint();
    let disp = (0..=samples)
        .map(|k| {
            let t = k as f64 / samples as f64;
            if 2 * k <= samples {
                Ok(phi.at_time(plateau(2.0 * t, delta)))
            } else {
                compose_maps(&psi.at_time(plateau(2.0 * t - 1.0, delta)), end)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    DiffeoPath::new(disp, PathSource::Concatenated)
}

/// Generator of `Psi *_l Phi` from the generators of both factors:
/// `lambda'(t) (U, H)^Phi_{lambda(t)}` then `tau'(t) (U, H)^Psi_{tau(t)}`.
/// Right composition with the fixed map `phi_1` leaves the generator of
/// the second half unchanged.
pub fn concatenate_generators(
    psi: &GeneratorPath,
    phi: &GeneratorPath,
    delta: f64,
    samples: usize,
) -> Result<GeneratorPath> {
    check_delta(delta)?;
    if psi.grid() != phi.grid() {
        return Err(Error::Mismatch(
            "concatenated generators live on different grids".into(),
        ));
    }
    if !samples.is_multiple_of(2) {
        return Err(Error::InvalidArgument(
            "concatenation needs an even sample count".into(),
        ));
    }
    let grid = phi.grid();
    let (u, h): (Vec<ScalarField>, Vec<HarmonicForm>) = (0..=samples)
        .map(|k| {
            let t = k as f64 / samples as f64;
            let (src, s) = if 2 * k <= samples {
                (phi, 2.0 * t)
            } else {
                (psi, 2.0 * t - 1.0)
            };
            let rate = 2.0 * plateau_rate(s, delta);
            if rate == 0.0 {
                return (ScalarField::zeros(grid), HarmonicForm::ZERO);
            }
            let tt = plateau(s, delta);
            (
                src.u_at(tt).scaled(rate).normalized(),
                src.h_at(tt).scaled(rate),
            )
        })
        .unzip();
    GeneratorPath::new(u, h)
}

/// Path reversal `t -> phi_{1-t} o phi_1^{-1}`.
pub fn reverse_path(phi: &DiffeoPath, tol: f64) -> Result<DiffeoPath> {
    let samples = phi.samples();
    let inv = invert_diffeo(phi.endpoint(), tol)?;
    let mut disp = Vec::with_capacity(samples + 1);
    disp.push(Displacement::identity(phi.grid()));
    for k in 1..=samples {
        disp.push(compose_maps(phi.at(samples - k), &inv)?);
    }
    DiffeoPath::new(disp, PathSource::Reversed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use std::f64::consts::PI;

    fn g(n: usize) -> TorusGrid {
        TorusGrid::new(n).unwrap()
    }

    #[test]
    fn plateau_shape() {
        assert_eq!(plateau(0.05, 0.1), 0.0);
        assert_eq!(plateau(0.95, 0.1), 1.0);
        assert!((plateau(0.5, 0.1) - 0.5).abs() < 1e-15);
        let h = 1e-6;
        let fd = (plateau(0.3 + h, 0.1) - plateau(0.3 - h, 0.1)) / (2.0 * h);
        assert!((fd - plateau_rate(0.3, 0.1)).abs() < 1e-8);
        let integral: f64 = (0..10000)
            .map(|i| plateau_rate((i as f64 + 0.5) / 1e4, 0.2) / 1e4)
            .sum();
        assert!((integral - 1.0).abs() < 1e-7);
    }

    #[test]
    fn invert_examples() {
        let grid = g(64);
        let id = invert_diffeo(&Displacement::identity(grid), 1e-12).unwrap();
        assert_eq!(id.max_abs(), 0.0);
        let tr = invert_diffeo(&Displacement::translation(grid, 0.3, 0.1), 1e-12).unwrap();
        assert!(tr.max_abs_diff(&Displacement::translation(grid, -0.3, -0.1)) < 1e-12);
        let shear = Displacement::from_fn(grid, |_, y| (0.3 * (2.0 * PI * y).sin(), 0.0));
        let inv = invert_diffeo(&shear, 1e-12).unwrap();
        let exact = Displacement::from_fn(grid, |_, y| (-0.3 * (2.0 * PI * y).sin(), 0.0));
        assert!(inv.max_abs_diff(&exact) <= 1e-10);
    }

    #[test]
    fn folded_map_not_invertible() {
        let grid = g(32);
        let fold = Displacement::from_fn(grid, |x, _| (0.4 * (2.0 * PI * x).sin(), 0.0));
        match invert_diffeo(&fold, 1e-12) {
            Err(Error::NotInvertible { .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn concatenate_translations() {
        let grid = g(16);
        let v = DiffeoPath::from_fn(grid, 16, |t| Displacement::translation(grid, 0.2 * t, 0.0))
            .unwrap();
        let w = DiffeoPath::from_fn(grid, 16, |t| Displacement::translation(grid, 0.0, -0.3 * t))
            .unwrap();
        let c = concatenate_left(&w, &v, DEFAULT_DELTA, 32).unwrap();
        assert!(
            c.endpoint()
                .max_abs_diff(&Displacement::translation(grid, 0.2, -0.3))
                < 1e-14
        );
        assert!(c.at(16).max_abs_diff(v.endpoint()) < 1e-14);
        let idp = DiffeoPath::identity(grid, 16).unwrap();
        let c = concatenate_left(&idp, &v, DEFAULT_DELTA, 32).unwrap();
        assert!(c.endpoint().max_abs_diff(v.endpoint()) < 1e-14);
        assert!(concatenate_left(&idp, &v, 0.5, 32).is_err());
        assert!(concatenate_left(&idp, &v, 0.1, 31).is_err());
    }

    #[test]
    fn reverse_translation() {
        let grid = g(16);
        let p = DiffeoPath::from_fn(grid, 16, |t| Displacement::translation(grid, t, 0.0)).unwrap();
        let r = reverse_path(&p, 1e-12).unwrap();
        assert_eq!(r.source(), PathSource::Reversed);
        assert!(
            r.endpoint()
                .max_abs_diff(&Displacement::translation(grid, -1.0, 0.0))
                < 1e-12
        );
        assert!(r.endpoint().reduced_sup() < 1e-12);
        let idp = DiffeoPath::identity(grid, 16).unwrap();
        let r = reverse_path(&idp, 1e-12).unwrap();
        assert!(r.displacements().iter().all(|d| d.max_abs() == 0.0));
    }
}
