//! Random closed forms: reconstruction, orthogonality, projection, `L0`/`L1`.

use hoferlike::calculus::exterior_derivative;
use hoferlike::hodge::{
    harmonic_projection, hodge_decompose, l2_inner, norm_equivalence_constants,
};
use hoferlike::{HarmonicForm, ScalarField};
use rand::Rng;
use serde::Serialize;

use super::{rng, Ctx};
use crate::corpus::{random_spec, Kind};
use crate::report::{num, Check, SuiteOutput, Table};
use crate::CliError;

#[derive(Serialize)]
struct Row {
    residual: f64,
    orthogonality: f64,
    harmonic_error: f64,
    potential_error: f64,
}

pub fn run(ctx: &Ctx) -> Result<SuiteOutput, CliError> {
    let cfg = ctx.cfg;
    let grid = cfg.grid();
    let mut rng = rng(cfg.seed, "hodge");
    let mut out = SuiteOutput::default();
    let mut table = Table::new(
        "forms",
        &[
            "id",
            "residual",
            "orthogonality",
            "harmonic_error",
            "potential_error",
        ],
    );
    let (mut worst_res, mut worst_orth, mut worst_h, mut worst_u) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut idempotent = true;
    for i in 0..cfg.hodge.forms {
        let spec = random_spec(&mut rng, format!("form{i:03}"), Kind::Hamiltonian, 4.0);
        let u = spec.build(grid, 16)?.u()[0].clone();
        let h = HarmonicForm::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let alpha = exterior_derivative(&u).add(&h.to_field(grid))?;
        let d = hodge_decompose(&alpha, cfg.closed_tol())?;
        let du = exterior_derivative(&d.u);
        let rebuilt = du.add(&d.h.to_field(grid))?;
        let row = Row {
            residual: alpha.max_abs_diff(&rebuilt).max(d.residual),
            orthogonality: l2_inner(&du, &d.h.to_field(grid)).abs(),
            harmonic_error: (d.h - h).norm(),
            potential_error: max_diff(&d.u, &u),
        };
        let p = harmonic_projection(&alpha);
        idempotent &= harmonic_projection(&p) == p;
        worst_res = worst_res.max(row.residual);
        worst_orth = worst_orth.max(row.orthogonality);
        worst_h = worst_h.max(row.harmonic_error);
        worst_u = worst_u.max(row.potential_error);
        table.push(vec![
            spec.id,
            num(row.residual),
            num(row.orthogonality),
            num(row.harmonic_error),
            num(row.potential_error),
        ]);
    }
    let (l0, l1) = norm_equivalence_constants(grid, cfg.hodge.angles)?;
    out.check(Check::le("reconstruction residual", worst_res, 1e-8));
    out.check(Check::le("exact/harmonic orthogonality", worst_orth, 1e-9));
    out.check(Check::flag("harmonic projection idempotent", idempotent));
    out.check(Check::le("harmonic part recovered", worst_h, 1e-10));
    out.check(Check::le("potential recovered", worst_u, 1e-8));
    out.check(Check::le("|L0 - 1|", (l0 - 1.0).abs(), 1e-5));
    out.check(Check::le("|L1 - 1|", (l1 - 1.0).abs(), 1e-5));
    out.data("forms", cfg.hodge.forms);
    out.data("l0", l0);
    out.data("l1", l1);
    out.tables.push(table);
    Ok(out)
}

fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
