//! Flux-norm duality: the constant harmonic path realizes `|flux|`, and
//! detours through Hamiltonian loops only cost more.

use std::f64::consts::TAU;

use hoferlike::functionals::{hoferlike_length, LengthMode};
use hoferlike::isotopy::{
    concatenate_generators, integrate_generator, FluxClass, GeneratorPath, DEFAULT_DELTA,
};
use hoferlike::lattice::{duality_bounds, DualityBounds};
use hoferlike::{Displacement, Error, HarmonicForm};
use serde::Serialize;

use super::Ctx;
use crate::report::{num, Check, SuiteOutput, Table};
use crate::CliError;

#[derive(Serialize)]
struct Row {
    flux: FluxClass,
    norm: f64,
    constant: f64,
    detour: f64,
    endpoint_error: f64,
    bounds: DualityBounds,
}

pub fn run(ctx: &Ctx) -> Result<SuiteOutput, CliError> {
    let cfg = ctx.cfg;
    let grid = cfg.grid();
    let samples = cfg.grid.samples;
    // a Hamiltonian loop: shear out and back
    let shear = GeneratorPath::from_potential(grid, samples, |_, _, y| 0.1 * (TAU * y).cos())?;
    let back = shear.scaled(-1.0);
    let ham_loop = concatenate_generators(&back, &shear, DEFAULT_DELTA, samples)?;
    let mut out = SuiteOutput::default();
    let mut rows = Vec::new();
    for &[a, b] in &cfg.duality.fluxes {
        let flux = FluxClass::new(a, b);
        let h = HarmonicForm::new(a, b);
        let constant_path = GeneratorPath::harmonic(grid, samples, |_| h)?;
        let constant = hoferlike_length(&constant_path, 2.0, LengthMode::Integrated)?.value;
        let detour_path =
            concatenate_generators(&constant_path, &ham_loop, DEFAULT_DELTA, samples)?;
        let detour = hoferlike_length(&detour_path, 2.0, LengthMode::Integrated)?.value;
        // X = (b, -a) is the sharp of a dx + b dy
        let end = integrate_generator(&constant_path, cfg.grid.substeps)?;
        let endpoint_error = end
            .endpoint()
            .torus_distance(&Displacement::translation(grid, b, -a));
        let bounds = match duality_bounds(flux, &[constant, detour]) {
            Ok(bd) => bd,
            Err(Error::ZeroFlux) => continue,
            Err(e) => return Err(e.into()),
        };
        rows.push(Row {
            flux,
            norm: flux.norm(),
            constant,
            detour,
            endpoint_error,
            bounds,
        });
    }
    let worst_const = rows
        .iter()
        .fold(0.0f64, |m, r| m.max((r.constant - r.norm).abs()));
    let worst_end = rows.iter().fold(0.0f64, |m, r| m.max(r.endpoint_error));
    let min_a = rows
        .iter()
        .fold(f64::INFINITY, |m, r| m.min(r.bounds.a_hat));
    let max_a = rows.iter().fold(0.0f64, |m, r| m.max(r.bounds.a_hat));
    out.check(Check::le(
        "constant path: |value - |flux||",
        worst_const,
        1e-6,
    ));
    out.check(Check::le(
        "constant path endpoint vs translation",
        worst_end,
        1e-6,
    ));
    out.check(Check::ge("A_hat (flux floor)", min_a, 1.0 - 1e-6));
    out.check(Check::le(
        "A_hat (constant path upper bound)",
        max_a,
        1.0 + 1e-6,
    ));
    out.check(Check::flag(
        "zero flux rejected",
        duality_bounds(FluxClass::ZERO, &[0.0]) == Err(Error::ZeroFlux),
    ));
    let mut t = Table::new(
        "duality",
        &[
            "a",
            "b",
            "norm",
            "constant",
            "detour",
            "a_hat",
            "b_hat",
            "endpoint_error",
        ],
    );
    for r in &rows {
        t.push(vec![
            num(r.flux.a),
            num(r.flux.b),
            num(r.norm),
            num(r.constant),
            num(r.detour),
            num(r.bounds.a_hat),
            num(r.bounds.b_hat),
            num(r.endpoint_error),
        ]);
    }
    out.data("rows", &rows);
    out.tables.push(t);
    Ok(out)
}
