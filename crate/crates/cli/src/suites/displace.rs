//! Displacement-energy brackets for strips and disks.

use hoferlike::estimator::{displacement_energy, DisplacementReport, Region};

use super::Ctx;
use crate::report::{num, Check, SuiteOutput, Table};
use crate::CliError;

pub fn run(ctx: &Ctx) -> Result<SuiteOutput, CliError> {
    let cfg = ctx.cfg;
    let mut est = cfg.estimator_config();
    est.n = cfg.grid.n;
    est.samples = cfg.grid.samples;
    est.substeps = cfg.grid.substeps;
    let regions: Vec<Region> = cfg
        .displace
        .strips
        .iter()
        .map(|&h| Region::Strip { height: h })
        .chain(
            cfg.displace
                .disks
                .iter()
                .map(|&r| Region::Disk { radius: r }),
        )
        .collect();
    let mut out = SuiteOutput::default();
    let mut t = Table::new(
        "regions",
        &[
            "shape",
            "size",
            "upper",
            "lower",
            "gap",
            "m_double_prime",
            "consistent",
        ],
    );
    let mut reports: Vec<DisplacementReport> = Vec::new();
    for region in regions {
        let r = displacement_energy(region, &est)?;
        let (shape, size) = match region {
            Region::Strip { height } => ("strip", height),
            Region::Annulus { width } => ("annulus", width),
            Region::Disk { radius } => ("disk", radius),
        };
        let tag = format!("{shape} {}", num(size));
        if shape == "strip" {
            // a vertical translation by h + clearance always clears a strip
            out.check(Check::le(
                format!("{tag}: upper"),
                r.upper,
                size + 0.05 + 5e-2,
            ));
            out.check(Check::le(
                format!("{tag}: |lower - min(1, m'')/2|"),
                (r.lower - 0.5 * r.m_double_prime.min(1.0)).abs(),
                1e-12,
            ));
            out.check(Check::ge(
                format!("{tag}: lower > 0"),
                r.lower,
                f64::MIN_POSITIVE,
            ));
            out.check(Check::flag(format!("{tag}: upper >= lower"), r.consistent));
        }
        out.check(Check::flag(
            format!("{tag}: best candidate displaces"),
            r.upper.is_finite(),
        ));
        t.push(vec![
            shape.into(),
            num(size),
            num(r.upper),
            num(r.lower),
            num(r.gap),
            num(r.m_double_prime),
            r.consistent.to_string(),
        ]);
        reports.push(r);
    }
    out.data("regions", &reports);
    out.tables.push(t);
    Ok(out)
}
