use super::{invert_diffeo, DiffeoPath, GeneratorPath};
use crate::calculus::{closedness_residual, contract_with_omega};
use crate::error::{Error, Result};
use crate::grid::{HarmonicForm, ScalarField, VectorFieldField};
use crate::hodge::decompose_unchecked;
use crate::interp::{Interpolation, Stencil};
use crate::par;

/// Newton tolerance used when recovering generators.
pub const INVERSE_TOL: f64 = 1e-12;

/// `X_k = (d phi_t / dt) o phi_t^{-1}` at sample `k`, fourth order in time.
pub fn eulerian_velocity(path: &DiffeoPath, k: usize) -> Result<VectorFieldField> {
    let grid = path.grid();
    let (vx, vy) = path.velocity_at_sample(k);
    let phi = path.at(k);
    if phi.max_abs() == 0.0 {
        return Ok(VectorFieldField { grid, vx, vy });
    }
    let inv = invert_diffeo(phi, INVERSE_TOL)?;
    let vals = par::map_range(grid.len(), |i| {
        let (x, y) = grid.coords(i);
        Stencil::new(grid, Interpolation::Cubic, x + inv.dx[i], y + inv.dy[i]).apply2(&vx, &vy)
    });
    let (vx, vy) = vals.into_iter().unzip();
    Ok(VectorFieldField { grid, vx, vy })
}

/// `(U_t, H_t)` from the maps: `X_t = (d phi_t / dt) o phi_t^{-1}` with
/// fourth-order time differences, then `iota_{X_t} omega` is checked for
/// closedness against `tol` and Hodge-decomposed.
pub fn recover_generator(path: &DiffeoPath, tol: f64) -> Result<GeneratorPath> {
    let mut us: Vec<ScalarField> = Vec::with_capacity(path.samples() + 1);
    let mut hs: Vec<HarmonicForm> = Vec::with_capacity(path.samples() + 1);
    for k in 0..=path.samples() {
        let alpha = contract_with_omega(&eulerian_velocity(path, k)?);
        let residual = closedness_residual(&alpha);
        if !(residual <= tol) {
            return Err(Error::NotSymplectic {
                sample: k,
                residual,
            });
        }
        let d = decompose_unchecked(&alpha);
        us.push(d.u);
        hs.push(d.h);
    }
    GeneratorPath::new(us, hs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::default_closed_tolerance;
    use crate::grid::{Displacement, TorusGrid};
    use crate::isotopy::integrate_generator;
    use std::f64::consts::PI;

    #[test]
    fn identity_and_translation() {
        let grid = TorusGrid::new(32).unwrap();
        let id = DiffeoPath::identity(grid, 16).unwrap();
        let gen = recover_generator(&id, 1e-9).unwrap();
        assert_eq!(gen.harmonic_sup(), 0.0);
        assert_eq!(gen.potential_sup(), 0.0);
        let gen = GeneratorPath::harmonic(grid, 16, |_| HarmonicForm::new(0.0, 1.0)).unwrap();
        let back = recover_generator(&integrate_generator(&gen, 2).unwrap(), 1e-6).unwrap();
        let (du, dh) = back.max_diff(&gen).unwrap();
        assert!(du < 1e-10 && dh < 1e-6, "{du} {dh}");
    }

    #[test]
    fn shear_round_trip() {
        let grid = TorusGrid::new(64).unwrap();
        let gen =
            GeneratorPath::from_potential(grid, 32, |_, _, y| 0.3 * (2.0 * PI * y).cos()).unwrap();
        let back = recover_generator(
            &integrate_generator(&gen, 4).unwrap(),
            default_closed_tolerance(grid),
        )
        .unwrap();
        let (du, dh) = back.max_diff(&gen).unwrap();
        assert!(du < 1e-5 && dh < 1e-8, "{du} {dh}");
    }

    #[test]
    fn non_symplectic_rejected() {
        let grid = TorusGrid::new(32).unwrap();
        let squeeze = DiffeoPath::from_fn(grid, 16, |t| {
            Displacement::from_fn(grid, |x, _| (0.05 * t * (2.0 * PI * x).sin(), 0.0))
        })
        .unwrap();
        match recover_generator(&squeeze, 1e-3) {
            Err(Error::NotSymplectic { .. }) => {}
            other => panic!("{other:?}"),
        }
    }
}
