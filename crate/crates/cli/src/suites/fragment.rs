//! Fragmentation of a harmonic isotopy into `nu_k H_t` pieces.

use std::f64::consts::PI;

use hoferlike::constructions::{fragment, fragment_flux_check, WeightKind};
use hoferlike::functionals::{hoferlike_length, LengthMode};
use hoferlike::isotopy::recover_generator;
use hoferlike::HarmonicForm;

use super::Ctx;
use crate::report::{num, Check, SuiteOutput, Table};
use crate::CliError;

/// `H_t = (pi/2) sin(pi t) dx + 0.3 cos(pi t) dy`, flux `(1, 0)`.
fn family(samples: usize) -> Vec<HarmonicForm> {
    (0..=samples)
        .map(|k| {
            let t = k as f64 / samples as f64;
            HarmonicForm::new(0.5 * PI * (PI * t).sin(), 0.3 * (PI * t).cos())
        })
        .collect()
}

pub fn run(ctx: &Ctx) -> Result<SuiteOutput, CliError> {
    let cfg = ctx.cfg;
    let grid = cfg.grid();
    let h = family(cfg.grid.samples);
    let plan = fragment(
        &h,
        WeightKind::InverseSquare,
        cfg.fragment.pieces,
        cfg.fragment.epsilon,
    )?;
    let sup_h = h.iter().fold(0.0f64, |m, f| m.max(f.norm()));
    let mut out = SuiteOutput::default();
    out.check(Check::le(
        "|sum nu_k - 1|",
        (plan.weight_sum() - 1.0).abs(),
        1e-12,
    ));
    out.check(Check::le(
        "harmonic sum residual",
        plan.harmonic_sum_residual(),
        1e-12,
    ));

    let mut t = Table::new(
        "pieces",
        &[
            "k",
            "weight",
            "length_sup",
            "predicted",
            "flux_a",
            "flux_b",
            "lattice_distance",
        ],
    );
    let fluxes = fragment_flux_check(&plan);
    let (mut scale_err, mut monotone) = (0.0f64, true);
    let mut lengths = Vec::with_capacity(plan.pieces());
    for (k, pf) in (1..=plan.pieces()).zip(&fluxes) {
        let l = hoferlike_length(&plan.piece_generator(grid, k)?, 2.0, LengthMode::Sup)?.value;
        let predicted = plan.weights[k - 1] * sup_h;
        scale_err = scale_err.max((l - predicted).abs());
        if let Some(prev) = lengths.last() {
            monotone &= l < *prev;
        }
        lengths.push(l);
        t.push(vec![
            k.to_string(),
            num(plan.weights[k - 1]),
            num(l),
            num(predicted),
            num(pf.flux.a),
            num(pf.flux.b),
            num(pf.lattice_distance),
        ]);
    }
    let whole = sup_h;
    out.check(Check::le(
        "per-piece l_HL^inf - nu_k sup|H|",
        scale_err,
        1e-12,
    ));
    out.check(Check::flag("piece lengths strictly decreasing", monotone));
    if let Some(n0) = plan.n0 {
        let tail_max = lengths[n0 - 1..].iter().fold(0.0f64, |m, l| m.max(*l));
        out.check(Check::le(
            "pieces past N0 below eps * l_HL^inf",
            tail_max,
            plan.epsilon * whole + 1e-15,
        ));
    }

    let composed = plan.compose_pieces(grid, cfg.grid.substeps)?;
    let rec = recover_generator(&composed, cfg.closed_tol())?;
    let h_err = rec
        .h()
        .iter()
        .zip(&h)
        .fold(0.0f64, |m, (a, b)| m.max((*a - *b).norm()));
    out.check(Check::le(
        "recovered harmonic part of the composition",
        h_err,
        2e-3,
    ));
    out.check(Check::le(
        "recovered exact part of the composition",
        rec.potential_sup(),
        2e-3,
    ));

    out.data("weights", &plan.weights);
    out.data("n0", plan.n0);
    out.data("epsilon", plan.epsilon);
    out.data("piece_flux", &fluxes);
    out.data("recovered_harmonic_error", h_err);
    out.tables.push(t);
    Ok(out)
}
