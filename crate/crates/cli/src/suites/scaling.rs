//! `omega -> c omega`: exact factor `c` in dimension 2, bracketed otherwise.

use hoferlike::functionals::scaling_law;

use super::{rng, Ctx};
use crate::corpus::mixed_corpus;
use crate::report::{num, Check, SuiteOutput, Table};
use crate::CliError;

pub fn run(ctx: &Ctx) -> Result<SuiteOutput, CliError> {
    let cfg = ctx.cfg;
    let grid = cfg.grid();
    let specs = mixed_corpus(
        &mut rng(cfg.seed, "scaling"),
        "gen",
        cfg.scaling.generators,
        1.0,
    );
    let mut out = SuiteOutput::default();
    let mut t = Table::new(
        "scaling",
        &[
            "id", "c", "n", "original", "rescaled", "ratio", "low", "high",
        ],
    );
    let (mut exact_err, mut bracket_gap) = (0.0f64, f64::NEG_INFINITY);
    for spec in &specs {
        let gen = spec.build(grid, cfg.grid.samples)?;
        for &c in &cfg.scaling.factors {
            for &n in &cfg.scaling.dims {
                let s = scaling_law(&gen, c, n)?;
                if let Some(exact) = s.exact_dim2 {
                    exact_err = exact_err.max((s.rescaled - exact).abs());
                } else {
                    // one rounding of the products is all the slack allowed
                    let ulp = 4.0 * f64::EPSILON * s.predicted_high;
                    bracket_gap = bracket_gap
                        .max(s.predicted_low - s.rescaled - ulp)
                        .max(s.rescaled - s.predicted_high - ulp);
                }
                t.push(vec![
                    spec.id.clone(),
                    num(c),
                    n.to_string(),
                    num(s.original),
                    num(s.rescaled),
                    num(s.rescaled / s.original),
                    num(s.predicted_low),
                    num(s.predicted_high),
                ]);
            }
        }
    }
    if cfg.scaling.dims.contains(&1) {
        out.check(Check::le("n = 1: |rescaled - c l_HL|", exact_err, 1e-10));
    }
    if cfg.scaling.dims.iter().any(|n| *n > 1) {
        out.check(Check::le(
            "n > 1: distance outside [low, high]",
            bracket_gap.max(0.0),
            0.0,
        ));
    }
    out.data("generators", &specs);
    out.tables.push(t);
    Ok(out)
}
