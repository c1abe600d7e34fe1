//! Lattice distances of `k * flux` for the iterates `phi^k`.

use hoferlike::isotopy::FluxClass;
use hoferlike::lattice::{iterate_lower_bound, IterateBound};
use hoferlike::Error;
use serde::Serialize;

use super::Ctx;
use crate::report::{num, Check, SuiteOutput, Table};
use crate::CliError;

#[derive(Serialize)]
struct Row {
    flux: FluxClass,
    bound: IterateBound,
    /// `k` with `k * flux` integral to within 1e-9.
    lattice_hits: Vec<usize>,
}

fn hits_lattice(v: f64, k: usize) -> bool {
    let x = v * k as f64;
    (x - x.round()).abs() <= 1e-9
}

pub fn run(ctx: &Ctx) -> Result<SuiteOutput, CliError> {
    let cfg = ctx.cfg;
    let k_max = cfg.iterates.k_max;
    let mut out = SuiteOutput::default();
    let mut rows = Vec::new();
    let mut t = Table::new("iterates", &["a", "b", "k", "distance"]);
    for &[a, b] in &cfg.iterates.fluxes {
        let flux = FluxClass::new(a, b);
        let bound = match iterate_lower_bound(flux, k_max) {
            Ok(bd) => bd,
            Err(Error::LatticeFlux) => continue,
            Err(e) => return Err(e.into()),
        };
        let hits: Vec<usize> = (1..=k_max)
            .filter(|&k| hits_lattice(a, k) && hits_lattice(b, k))
            .collect();
        let tag = format!("({}, {})", num(a), num(b));
        let mut vanish_ok = true;
        for (k, d) in (1..=k_max).zip(&bound.distances) {
            vanish_ok &= if hits.contains(&k) {
                *d <= 1e-9
            } else {
                *d > 1e-9
            };
            t.push(vec![num(a), num(b), k.to_string(), num(*d)]);
        }
        out.check(Check::flag(
            format!("{tag}: distances vanish exactly on lattice hits"),
            vanish_ok,
        ));
        if hits.is_empty() {
            out.check(Check::ge(
                format!("{tag}: floor"),
                bound.floor,
                f64::MIN_POSITIVE,
            ));
        }
        rows.push(Row {
            flux,
            bound,
            lattice_hits: hits,
        });
    }
    out.check(Check::flag(
        "lattice flux rejected",
        iterate_lower_bound(FluxClass::new(1.0, -2.0), k_max) == Err(Error::LatticeFlux),
    ));
    out.data("k_max", k_max);
    out.data("rows", &rows);
    out.tables.push(t);
    Ok(out)
}
