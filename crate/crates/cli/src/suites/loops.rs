//! Harmonic flows `X = n d/dx + m d/dy`: loops exactly on integer classes.

use hoferlike::calculus::contract_with_omega;
use hoferlike::hodge::harmonic_part;
use hoferlike::isotopy::{integrate_generator, is_loop, GeneratorPath};
use hoferlike::{par, VectorFieldField};
use serde::Serialize;

use super::Ctx;
use crate::report::{num, Check, SuiteOutput, Table};
use crate::CliError;

#[derive(Serialize)]
struct Row {
    n: f64,
    m: f64,
    integer: bool,
    residual: f64,
    is_loop: bool,
}

pub fn run(ctx: &Ctx) -> Result<SuiteOutput, CliError> {
    let cfg = ctx.cfg;
    let grid = cfg.grid();
    let r = cfg.loop_.range;
    let mut classes: Vec<(f64, f64, bool)> = Vec::new();
    for n in -r..=r {
        for m in -r..=r {
            classes.push((n as f64, m as f64, true));
        }
    }
    for k in -r..r {
        let h = k as f64 + 0.5;
        classes.push((h, 0.0, false));
        classes.push((0.0, h, false));
        classes.push((h, h, false));
    }
    let rows = par::map_slice(&classes, |&(n, m, integer)| -> hoferlike::Result<Row> {
        // iota_X omega for the constant field (n, m)
        let h = harmonic_part(&contract_with_omega(&VectorFieldField::constant(
            grid, n, m,
        )));
        let gen = GeneratorPath::harmonic(grid, cfg.grid.samples, |_| h)?;
        let path = integrate_generator(&gen, cfg.grid.substeps)?;
        Ok(Row {
            n,
            m,
            integer,
            residual: path.endpoint().reduced_sup(),
            is_loop: is_loop(&path, cfg.tolerances.loop_),
        })
    })
    .into_iter()
    .collect::<hoferlike::Result<Vec<_>>>()?;
    let mut out = SuiteOutput::default();
    let int_worst = rows
        .iter()
        .filter(|r| r.integer)
        .fold(0.0f64, |m, r| m.max(r.residual));
    let half_best = rows
        .iter()
        .filter(|r| !r.integer)
        .fold(f64::INFINITY, |m, r| m.min(r.residual));
    out.check(Check::le("integer class residual", int_worst, 1e-6));
    out.check(Check::ge("half-integer class residual", half_best, 0.1));
    out.check(Check::flag(
        "is_loop exactly on integer classes",
        rows.iter().all(|r| r.is_loop == r.integer),
    ));
    let mut t = Table::new("loops", &["n", "m", "integer", "residual", "is_loop"]);
    for r in &rows {
        t.push(vec![
            num(r.n),
            num(r.m),
            r.integer.to_string(),
            num(r.residual),
            r.is_loop.to_string(),
        ]);
    }
    out.data("classes", &rows);
    out.tables.push(t);
    Ok(out)
}
