//! Hofer versus Hofer-like energies of Hamiltonian targets, with and
//! without attached lattice loops, and the symmetrized norm.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::HarmonicForm;
use crate::isotopy::{reverse_path, INVERSE_TOL};
use crate::lattice::lattice_min_norm;

use super::{
    estimate_energy, estimate_with_attachment, integrate_decoded, reversed, with_harmonic_channel,
    EnergyEstimate, EnergyKind, EstimatorConfig, ModeAmplitude, ATTACHMENT_NEIGHBOURHOOD,
};

/// Hamiltonian target given by an autonomous seed potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flux0Target {
    pub id: String,
    pub modes: Vec<ModeAmplitude>,
}

fn mode(kx: i32, ky: i32, cos: f64, sin: f64) -> ModeAmplitude {
    ModeAmplitude { kx, ky, cos, sin }
}

/// Five seeds with oscillations 0.2, 0.6, 1.0, 1.2 and 1.5.
pub fn default_flux0_targets() -> Vec<Flux0Target> {
    let t = |id: &str, modes| Flux0Target {
        id: id.into(),
        modes,
    };
    vec![
        t(
            "cells-0.2",
            vec![mode(1, 0, 0.05, 0.0), mode(0, 1, 0.05, 0.0)],
        ),
        t("shear-y-0.6", vec![mode(0, 1, 0.3, 0.0)]),
        t("shear-x-1.0", vec![mode(1, 0, 0.0, 0.5)]),
        t("diagonal-1.2", vec![mode(1, 1, 0.6, 0.0)]),
        t("shear-y-1.5", vec![mode(0, 1, 0.75, 0.0)]),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttachmentRow {
    pub gamma: [i64; 2],
    pub value: f64,
    pub endpoint_error: f64,
}

/// Results for one exponent `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PRow {
    pub p: f64,
    pub free: EnergyEstimate,
    pub attachments: Vec<AttachmentRow>,
    /// Minimum over the free estimate and all attachments.
    pub e_hl: f64,
    pub difference: f64,
    /// Every attachment is at least the free estimate (checked when the
    /// free estimate is below the lattice minimum).
    pub attachments_not_better: bool,
    pub attachments_above_min_norm: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flux0Row {
    pub id: String,
    pub seed_length: f64,
    pub e_h: EnergyEstimate,
    pub rows: Vec<PRow>,
    pub pass: bool,
}

/// For each target: `E_H`, then `E_HL` warm-started from the Hamiltonian
/// optimum, then every loop of norm at most `sqrt 2` attached to it.
pub fn flux0_check(
    targets: &[Flux0Target],
    ps: &[f64],
    tol_opt: f64,
    cfg: &EstimatorConfig,
) -> Result<Vec<Flux0Row>> {
    let grid = cfg.grid()?;
    let mut out = Vec::with_capacity(targets.len());
    for target in targets {
        let ham = cfg.parametrization(EnergyKind::Hofer)?;
        let seed = ham.encode_constant(&target.modes, HarmonicForm::ZERO)?;
        let endpoint = integrate_decoded(&ham, &seed, grid, cfg.samples, cfg.substeps)?
            .endpoint()
            .clone();
        let seed_length =
            super::path_lengths(&ham.decode(&seed, grid, cfg.samples)?, EnergyKind::Hofer)?.0;
        let e_h = estimate_energy(
            &endpoint,
            EnergyKind::Hofer,
            std::slice::from_ref(&seed),
            cfg,
        )?;
        let mut rows = Vec::with_capacity(ps.len());
        for &p in ps {
            let kind = EnergyKind::HoferLike { p };
            let seeds = [
                with_harmonic_channel(&e_h.theta, cfg.coeffs),
                with_harmonic_channel(&seed, cfg.coeffs),
            ];
            let free = estimate_energy(&endpoint, kind, &seeds, cfg)?;
            let attachments = ATTACHMENT_NEIGHBOURHOOD
                .iter()
                .map(|&g| {
                    let est = estimate_with_attachment(&free, g, &endpoint, cfg)?;
                    Ok(AttachmentRow {
                        gamma: g,
                        value: est.value,
                        endpoint_error: est.endpoint_error,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let feasible = attachments
                .iter()
                .filter(|a| a.endpoint_error <= cfg.endpoint_tol);
            let e_hl = feasible.map(|a| a.value).fold(free.value, f64::min);
            let difference = e_hl - e_h.value;
            let attachments_not_better = free.value >= lattice_min_norm()
                || attachments.iter().all(|a| a.value >= free.value);
            let attachments_above_min_norm =
                attachments.iter().all(|a| a.value >= lattice_min_norm());
            rows.push(PRow {
                p,
                pass: difference.abs() <= tol_opt && attachments_not_better,
                free,
                attachments,
                e_hl,
                difference,
                attachments_not_better,
                attachments_above_min_norm,
            });
        }
        out.push(Flux0Row {
            id: target.id.clone(),
            seed_length,
            pass: rows.iter().all(|r| r.pass),
            e_h,
            rows,
        });
    }
    Ok(out)
}

/// `e(phi)`, `e(phi^{-1})` and their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub forward: EnergyEstimate,
    pub backward: EnergyEstimate,
    pub norm: f64,
}

/// Symmetrized energy of the time-one map of `theta`; the inverse target
/// comes from reversing the integrated path and is seeded with `-X_{1-t}`.
pub fn norm_estimate(theta: &[f64], kind: EnergyKind, cfg: &EstimatorConfig) -> Result<NormReport> {
    let param = cfg.parametrization(kind)?;
    let path = integrate_decoded(&param, theta, cfg.grid()?, cfg.samples, cfg.substeps)?;
    let back_target = reverse_path(&path, INVERSE_TOL)?;
    let forward = estimate_energy(path.endpoint(), kind, &[theta.to_vec()], cfg)?;
    let backward = estimate_energy(
        back_target.endpoint(),
        kind,
        &[reversed(theta, cfg.coeffs)],
        cfg,
    )?;
    Ok(NormReport {
        norm: 0.5 * (forward.value + backward.value),
        forward,
        backward,
    })
}
