//! Hofer versus Hofer-like energies of Hamiltonian targets.

use hoferlike::estimator::{default_flux0_targets, flux0_check, Flux0Row, Flux0Target};
use hoferlike::par;

use super::Ctx;
use crate::report::{num, Check, SuiteOutput, Table};
use crate::CliError;

pub fn run(ctx: &Ctx) -> Result<SuiteOutput, CliError> {
    let cfg = ctx.cfg;
    let est = cfg.estimator_config();
    let targets = default_flux0_targets();
    let tol = cfg.flux0.tol_opt;
    // targets are independent; results come back in target order
    let rows = par::map_slice(&targets, |t: &Flux0Target| {
        flux0_check(std::slice::from_ref(t), &cfg.flux0.exponents, tol, &est)
            .map(|mut v| v.remove(0))
    })
    .into_iter()
    .collect::<hoferlike::Result<Vec<Flux0Row>>>()?;
    let mut out = SuiteOutput::default();
    let mut t = Table::new(
        "flux0",
        &[
            "id",
            "p",
            "seed_length",
            "e_h",
            "e_hl",
            "difference",
            "min_attachment",
            "endpoint_error",
        ],
    );
    for r in &rows {
        for pr in &r.rows {
            let tag = format!("{} p={}", r.id, num(pr.p));
            out.check(Check::le(
                format!("{tag}: |E_HL - E_H|"),
                pr.difference.abs(),
                tol,
            ));
            out.check(Check::flag(
                format!("{tag}: attachments not better"),
                pr.attachments_not_better,
            ));
            let min_att = pr
                .attachments
                .iter()
                .fold(f64::INFINITY, |m, a| m.min(a.value));
            let worst_end = pr
                .attachments
                .iter()
                .fold(pr.free.endpoint_error, |m, a| m.max(a.endpoint_error));
            t.push(vec![
                r.id.clone(),
                num(pr.p),
                num(r.seed_length),
                num(r.e_h.value),
                num(pr.e_hl),
                num(pr.difference),
                num(min_att),
                num(worst_end),
            ]);
        }
        out.check(Check::le(
            format!("{}: E_H endpoint error", r.id),
            r.e_h.endpoint_error,
            est.endpoint_tol,
        ));
    }
    out.data("targets", &targets);
    out.data("estimator", &est);
    out.data("rows", &rows);
    out.tables.push(t);
    Ok(out)
}
