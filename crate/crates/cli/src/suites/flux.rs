//! Flux two ways on a mixed corpus; additivity under composition and
//! agreement of left concatenation with pointwise composition.

use hoferlike::isotopy::{
    compose_paths, concatenate_left, flux_cohomological, flux_definition, integrate_generator,
    DiffeoPath, FluxClass, DEFAULT_DELTA,
};
use hoferlike::lattice::is_in_lattice;
use hoferlike::par;
use serde::Serialize;

use super::{rng, Ctx};
use crate::corpus::{mixed_corpus, Kind};
use crate::report::{num, Check, SuiteOutput, Table};
use crate::CliError;

#[derive(Serialize)]
struct PathRow {
    id: String,
    kind: Kind,
    cohomological: FluxClass,
    definition: FluxClass,
    difference: f64,
}

#[derive(Serialize)]
struct PairRow {
    psi: String,
    phi: String,
    composed: FluxClass,
    sum_error: f64,
    concatenated: FluxClass,
    concat_error: f64,
    endpoint_error: f64,
}

const TOL: f64 = 1e-5;

pub fn run(ctx: &Ctx) -> Result<SuiteOutput, CliError> {
    let cfg = ctx.cfg;
    let grid = cfg.grid();
    let specs = mixed_corpus(&mut rng(cfg.seed, "flux"), "path", cfg.flux.paths, 0.5);
    // only the paths entering pairs are kept in memory
    let pair_count = cfg.flux.pairs.min(specs.len() / 2);
    let results = par::map_range(
        specs.len(),
        |i| -> hoferlike::Result<(Option<DiffeoPath>, FluxClass, FluxClass)> {
            let gen = specs[i].build(grid, cfg.grid.samples)?;
            let path = integrate_generator(&gen, cfg.grid.substeps)?;
            let def = flux_definition(&path)?;
            Ok((
                (i < 2 * pair_count).then_some(path),
                flux_cohomological(&gen),
                def,
            ))
        },
    );
    let mut paths = Vec::with_capacity(specs.len());
    let mut rows = Vec::with_capacity(specs.len());
    for (spec, r) in specs.iter().zip(results) {
        let (path, coh, def) = r?;
        rows.push(PathRow {
            id: spec.id.clone(),
            kind: spec.kind,
            cohomological: coh,
            definition: def,
            difference: coh.distance(&def),
        });
        paths.push((path, def));
    }
    let mut out = SuiteOutput::default();
    let worst = rows.iter().fold(0.0f64, |m, r| m.max(r.difference));
    out.check(Check::le("flux definition vs cohomological", worst, TOL));
    let ham: Vec<&PathRow> = rows
        .iter()
        .filter(|r| r.kind == Kind::Hamiltonian)
        .collect();
    let worst_ham = ham.iter().fold(0.0f64, |m, r| m.max(r.definition.norm()));
    out.check(Check::le("Hamiltonian flux", worst_ham, TOL));
    let in_lattice = ham
        .iter()
        .map(|r| is_in_lattice(r.definition, TOL))
        .collect::<Result<Vec<_>, _>>()?;
    out.check(Check::flag(
        "Hamiltonian fluxes in the lattice",
        in_lattice.iter().all(|b| *b),
    ));

    let pairs: Vec<(usize, usize)> = (0..pair_count).map(|i| (2 * i + 1, 2 * i)).collect();
    let pair_rows = par::map_slice(&pairs, |&(i, j)| -> hoferlike::Result<PairRow> {
        let (psi, f_psi) = &paths[i];
        let (phi, f_phi) = &paths[j];
        let (psi, phi) = (psi.as_ref().expect("kept"), phi.as_ref().expect("kept"));
        let comp = compose_paths(psi, phi)?;
        let composed = flux_definition(&comp)?;
        let cat = concatenate_left(psi, phi, DEFAULT_DELTA, cfg.grid.samples)?;
        let concatenated = flux_definition(&cat)?;
        Ok(PairRow {
            psi: specs[i].id.clone(),
            phi: specs[j].id.clone(),
            composed,
            sum_error: composed.distance(&(*f_psi + *f_phi)),
            concatenated,
            concat_error: concatenated.distance(&composed),
            endpoint_error: cat.endpoint().torus_distance(comp.endpoint()),
        })
    })
    .into_iter()
    .collect::<hoferlike::Result<Vec<_>>>()?;
    let worst_sum = pair_rows.iter().fold(0.0f64, |m, r| m.max(r.sum_error));
    let worst_cat = pair_rows.iter().fold(0.0f64, |m, r| m.max(r.concat_error));
    let worst_end = pair_rows
        .iter()
        .fold(0.0f64, |m, r| m.max(r.endpoint_error));
    out.check(Check::le(
        "flux additivity under composition",
        worst_sum,
        TOL,
    ));
    out.check(Check::le(
        "flux of concatenation vs composition",
        worst_cat,
        TOL,
    ));
    out.check(Check::le(
        "concatenation vs composition endpoint",
        worst_end,
        1e-6,
    ));

    let mut t = Table::new(
        "paths",
        &[
            "id",
            "kind",
            "coh_a",
            "coh_b",
            "def_a",
            "def_b",
            "difference",
        ],
    );
    for r in &rows {
        t.push(vec![
            r.id.clone(),
            format!("{:?}", r.kind).to_lowercase(),
            num(r.cohomological.a),
            num(r.cohomological.b),
            num(r.definition.a),
            num(r.definition.b),
            num(r.difference),
        ]);
    }
    let mut tp = Table::new(
        "pairs",
        &["psi", "phi", "sum_error", "concat_error", "endpoint_error"],
    );
    for r in &pair_rows {
        tp.push(vec![
            r.psi.clone(),
            r.phi.clone(),
            num(r.sum_error),
            num(r.concat_error),
            num(r.endpoint_error),
        ]);
    }
    out.data("paths", &rows);
    out.data("pairs", &pair_rows);
    out.tables.push(t);
    out.tables.push(tp);
    Ok(out)
}
