//! The family `Z_{s,t}`, its flow `G` and velocity `V`: Gronwall and
//! oscillation bounds on a corpus of families.

use std::f64::consts::PI;

use hoferlike::constructions::{
    build_z, gronwall_check, osc_bound_check, GronwallReport, OscReport,
};
use hoferlike::hodge::norm_equivalence_constants;
use hoferlike::{par, TorusGrid, VectorFieldField};
use serde::Serialize;

use super::{rng, Ctx};
use crate::corpus::{random_spec, Kind};
use crate::report::{num, Check, SuiteOutput, Table};
use crate::CliError;

#[derive(Serialize)]
struct Row {
    id: String,
    gronwall: GronwallReport,
    osc: OscReport,
}

const CONSTANT_X: (f64, f64) = (0.6, 0.8);

fn families(ctx: &Ctx, grid: TorusGrid) -> Result<Vec<(String, Vec<VectorFieldField>)>, CliError> {
    let cfg = ctx.cfg;
    let m = cfg.grid.s;
    let times = |f: &dyn Fn(f64) -> VectorFieldField| {
        (0..=m).map(|k| f(k as f64 / m as f64)).collect::<Vec<_>>()
    };
    let mut fams = vec![
        (
            "constant".to_string(),
            times(&|_| VectorFieldField::constant(grid, CONSTANT_X.0, CONSTANT_X.1)),
        ),
        (
            "rotating".to_string(),
            times(&|t| VectorFieldField::constant(grid, (PI * t).cos(), (PI * t).sin())),
        ),
    ];
    let mut rng = rng(cfg.seed, "twoparam");
    let extra = cfg.twoparam.families.saturating_sub(2);
    for i in 0..extra {
        // the last two carry a Hamiltonian part as well
        let kind = if i + 2 >= extra {
            Kind::Mixed
        } else {
            Kind::Harmonic
        };
        let spec = random_spec(&mut rng, format!("family{i:02}"), kind, 0.5);
        let gen = spec.build(grid, m.max(16))?;
        let fields = times(&|t| {
            let k = (t * gen.samples() as f64).round() as usize;
            gen.velocity(k)
        });
        fams.push((spec.id, fields));
    }
    fams.truncate(cfg.twoparam.families);
    Ok(fams)
}

pub fn run(ctx: &Ctx) -> Result<SuiteOutput, CliError> {
    let cfg = ctx.cfg;
    let grid = TorusGrid::new(cfg.twoparam.n)?;
    let (l0, _) = norm_equivalence_constants(grid, cfg.hodge.angles)?;
    let closed = cfg.tolerances.closed * cfg.twoparam.n as f64;
    let fams = families(ctx, grid)?;
    let rows = par::map_slice(&fams, |(id, x)| -> hoferlike::Result<Row> {
        let mut fam = build_z(x)?;
        fam.flow_in_s(cfg.grid.substeps)?;
        fam.extract_v()?;
        Ok(Row {
            id: id.clone(),
            gronwall: gronwall_check(&fam)?,
            osc: osc_bound_check(&fam, 1.0, l0, closed)?,
        })
    })
    .into_iter()
    .collect::<hoferlike::Result<Vec<_>>>()?;
    let mut out = SuiteOutput::default();
    let mut t = Table::new(
        "families",
        &[
            "id",
            "sup_v",
            "n_hat",
            "k_hat",
            "gronwall_bound",
            "osc",
            "osc_bound",
            "sup_x_hl",
        ],
    );
    for r in &rows {
        out.check(Check::le(
            format!("{}: Gronwall", r.id),
            r.gronwall.sup_v,
            r.gronwall.bound + 1e-6,
        ));
        out.check(Check::le(
            format!("{}: oscillation bound", r.id),
            r.osc.osc,
            r.osc.bound + 1e-6,
        ));
        t.push(vec![
            r.id.clone(),
            num(r.gronwall.sup_v),
            num(r.gronwall.n_hat),
            num(r.gronwall.k_hat),
            num(r.gronwall.bound),
            num(r.osc.osc),
            num(r.osc.bound),
            num(r.osc.sup_x_hl),
        ]);
    }
    if let Some(c) = rows.iter().find(|r| r.id == "constant") {
        let exact = CONSTANT_X.0.hypot(CONSTANT_X.1) / 4.0;
        out.check(Check::le(
            "constant X: |sup V - |X|/4|",
            (c.gronwall.sup_v - exact).abs(),
            1e-6,
        ));
    }
    out.data("l0", l0);
    out.data("families", &rows);
    out.tables.push(t);
    Ok(out)
}
