//! Length functionals: concatenation additivity, monotonicity in `p`,
//! the flux floor and the Calabi inequality.

use hoferlike::functionals::{calabi, hofer_length, hoferlike_length, LengthMode, LengthReport};
use hoferlike::isotopy::{concatenate_generators, flux_cohomological, DEFAULT_DELTA};
use hoferlike::ScalarField;
use rand::Rng;
use serde::Serialize;

use super::{rng, Ctx};
use crate::corpus::{mixed_corpus, random_spec, Kind};
use crate::report::{num, Check, SuiteOutput, Table};
use crate::CliError;

#[derive(Serialize)]
struct CalabiRow {
    id: String,
    calabi: f64,
    hofer: f64,
    offset: f64,
    calabi_offset: f64,
}

pub fn run(ctx: &Ctx) -> Result<SuiteOutput, CliError> {
    let cfg = ctx.cfg;
    let grid = cfg.grid();
    let samples = cfg.grid.samples;
    let mut rng = rng(cfg.seed, "lengths");
    let mut out = SuiteOutput::default();
    let mut ledger = Table::new(
        "lengths",
        &LengthReport::CSV_HEADER.split(',').collect::<Vec<_>>(),
    );
    let mut exps = cfg.lengths.exponents.clone();
    exps.sort_by(f64::total_cmp);

    let specs = mixed_corpus(&mut rng, "gen", cfg.lengths.generators, 1.0);
    let (mut mono_violations, mut floor_gap, mut ham_mismatch) =
        (0usize, f64::NEG_INFINITY, 0usize);
    let mut gens = Vec::new();
    for spec in &specs {
        let gen = spec.build(grid, samples)?;
        let mut prev = f64::NEG_INFINITY;
        for &p in &exps {
            let r = hoferlike_length(&gen, p, LengthMode::Integrated)?.with_id(&spec.id);
            if r.value < prev {
                mono_violations += 1;
            }
            prev = r.value;
            ledger.push(r.csv_fields());
        }
        let l2 = hoferlike_length(&gen, 2.0, LengthMode::Integrated)?.value;
        floor_gap = floor_gap.max(flux_cohomological(&gen).norm() - l2);
        if spec.kind == Kind::Hamiltonian {
            let h = hofer_length(&gen, LengthMode::Integrated)?.with_id(&spec.id);
            if h.value.to_bits() != l2.to_bits() {
                ham_mismatch += 1;
            }
            ledger.push(h.csv_fields());
        }
        if gens.len() < 2 * cfg.lengths.pairs {
            gens.push(gen);
        }
    }
    out.check(Check::le(
        "monotonicity violations in p",
        mono_violations as f64,
        0.0,
    ));
    out.check(Check::le("flux norm - l_HL(1,2)", floor_gap, 1e-8));
    out.check(Check::le(
        "Hamiltonian l_HL(1,2) != l_H (bitwise)",
        ham_mismatch as f64,
        0.0,
    ));

    let mut add = Table::new(
        "additivity",
        &["psi", "phi", "p", "concatenated", "sum", "error"],
    );
    let mut worst_add = 0.0f64;
    for k in 0..gens.len() / 2 {
        let (psi, phi) = (&gens[2 * k + 1], &gens[2 * k]);
        let cat = concatenate_generators(psi, phi, DEFAULT_DELTA, samples)?;
        for &p in &exps {
            let l = |g| hoferlike_length(g, p, LengthMode::Integrated).map(|r| r.value);
            let (lc, sum) = (l(&cat)?, l(psi)? + l(phi)?);
            worst_add = worst_add.max((lc - sum).abs());
            add.push(vec![
                specs[2 * k + 1].id.clone(),
                specs[2 * k].id.clone(),
                num(p),
                num(lc),
                num(sum),
                num((lc - sum).abs()),
            ]);
        }
    }
    out.check(Check::le("concatenation additivity", worst_add, 1e-3));

    let mut cal_rows = Vec::with_capacity(cfg.lengths.calabi);
    let (mut cal_gap, mut offset_err) = (f64::NEG_INFINITY, 0.0f64);
    for i in 0..cfg.lengths.calabi {
        let spec = random_spec(&mut rng, format!("ham{i:03}"), Kind::Hamiltonian, 1.0);
        let gen = spec.build(grid, samples)?;
        let c = calabi(&gen, None)?;
        let hofer = hofer_length(&gen, LengthMode::Integrated)?.value;
        let offset: f64 = rng.gen_range(-1.0..1.0);
        let off = vec![ScalarField::constant(grid, offset); samples + 1];
        let with_offset = calabi(&gen, Some(&off))?;
        cal_gap = cal_gap.max(c.abs() - hofer);
        offset_err = offset_err.max((with_offset - offset).abs());
        cal_rows.push(CalabiRow {
            id: spec.id,
            calabi: c,
            hofer,
            offset,
            calabi_offset: with_offset,
        });
    }
    out.check(Check::le("|Cal| - l_H", cal_gap, 1e-9));
    out.check(Check::le("offset Calabi error", offset_err, 1e-12));

    let mut ct = Table::new(
        "calabi",
        &["id", "calabi", "hofer", "offset", "calabi_offset"],
    );
    for r in &cal_rows {
        ct.push(vec![
            r.id.clone(),
            num(r.calabi),
            num(r.hofer),
            num(r.offset),
            num(r.calabi_offset),
        ]);
    }
    out.data("generators", &specs);
    out.data("calabi", &cal_rows);
    out.tables.extend([ledger, add, ct]);
    Ok(out)
}
