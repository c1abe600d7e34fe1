//! Displacement energy brackets for strips and disks.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{reduce_half, wrap_unit, HarmonicForm, TorusGrid};
use crate::isotopy::{flux_cohomological, integrate_generator, FluxClass, GeneratorPath};
use crate::lattice::flux_floor;

use super::{path_lengths, EnergyKind, EstimatorConfig};

/// Extra distance every candidate pushes the region past itself.
pub const DISPLACEMENT_CLEARANCE: f64 = 0.05;

/// Regions of the unit torus. Strips are horizontal and centred at
/// `y = 1/2`; an essential annulus is the same set as a strip of its
/// width. Disks are centred at `(1/2, 1/4)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Region {
    Strip { height: f64 },
    Annulus { width: f64 },
    Disk { radius: f64 },
}

impl Region {
    /// Torus distance from a point to the closed region.
    fn distance(&self, x: f64, y: f64) -> f64 {
        match *self {
            Region::Strip { height: h } | Region::Annulus { width: h } => {
                reduce_half(y - 0.5).abs() - 0.5 * h
            }
            Region::Disk { radius } => reduce_half(x - 0.5).hypot(reduce_half(y - 0.25)) - radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub name: String,
    pub length: f64,
    pub flux: FluxClass,
    /// Least distance from the image of a region node to the region.
    pub clearance: f64,
    pub displaces: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementReport {
    pub region: Region,
    pub upper: f64,
    pub lower: f64,
    pub gap: f64,
    /// Flux norm of the translation candidate, standing in for `m''`.
    pub m_double_prime: f64,
    pub translation: Candidate,
    pub hamiltonian: Option<Candidate>,
    pub consistent: bool,
}

fn measure(
    name: &str,
    gen: &GeneratorPath,
    region: Region,
    cfg: &EstimatorConfig,
) -> Result<Candidate> {
    let grid = gen.grid();
    let end = integrate_generator(gen, cfg.substeps)?;
    let phi = end.endpoint();
    let mut clearance = f64::INFINITY;
    let mut inside = 0;
    for idx in 0..grid.len() {
        let (x, y) = grid.coords(idx);
        if region.distance(x, y) > 0.0 {
            continue;
        }
        inside += 1;
        let (px, py) = phi.image(idx);
        clearance = clearance.min(region.distance(wrap_unit(px), wrap_unit(py)));
    }
    if inside == 0 {
        return Err(Error::InvalidArgument(
            "region contains no grid node".into(),
        ));
    }
    Ok(Candidate {
        name: name.into(),
        length: path_lengths(gen, EnergyKind::HoferLike { p: 2.0 })?.0,
        flux: flux_cohomological(gen),
        clearance,
        displaces: clearance > 0.0,
    })
}

/// Upper bound from a harmonic translation and, for disks, a Hamiltonian
/// shear; lower bound `min{m, m''} / (2 sqrt Vol)` with `m''` read off the
/// translation.
pub fn displacement_energy(region: Region, cfg: &EstimatorConfig) -> Result<DisplacementReport> {
    let grid: TorusGrid = cfg.grid()?;
    let size = match region {
        Region::Strip { height: s } | Region::Annulus { width: s } | Region::Disk { radius: s } => {
            s
        }
    };
    if !size.is_finite() {
        return Err(Error::InvalidArgument("region size must be finite".into()));
    }
    if size <= 0.0 {
        return Err(Error::DegenerateRegion);
    }
    let c = DISPLACEMENT_CLEARANCE;
    let (translation, hamiltonian) = match region {
        Region::Strip { height: h } | Region::Annulus { width: h } => {
            if h >= 0.5 {
                return Err(Error::NotDisplaceable);
            }
            let d = (h + c).min(0.5);
            // iota_X omega = -d dx for X = (0, d)
            let gen = GeneratorPath::harmonic(grid, cfg.samples, |_| HarmonicForm::new(-d, 0.0))?;
            // an essential strip has no Hamiltonian displacement
            (measure("vertical translation", &gen, region, cfg)?, None)
        }
        Region::Disk { radius: r } => {
            if r >= 0.25 {
                return Err(Error::NotDisplaceable);
            }
            let d = (2.0 * r + c).min(0.5);
            let gen = GeneratorPath::harmonic(grid, cfg.samples, |_| HarmonicForm::new(0.0, d))?;
            let tr = measure("horizontal translation", &gen, region, cfg)?;
            let amp = (2.0 * r + c) / (2.0 * PI * (2.0 * PI * r).cos());
            let shear = GeneratorPath::from_potential(grid, cfg.samples, |_, _, y| {
                amp * (2.0 * PI * y).cos()
            })?;
            (tr, Some(measure("shear", &shear, region, cfg)?))
        }
    };
    let upper = std::iter::once(&translation)
        .chain(hamiltonian.as_ref())
        .filter(|cand| cand.displaces)
        .map(|cand| cand.length)
        .fold(f64::INFINITY, f64::min);
    if !upper.is_finite() {
        return Err(Error::NotDisplaceable);
    }
    let m_double_prime = translation.flux.norm();
    let lower = flux_floor(translation.flux, 1.0)?.prefactored;
    Ok(DisplacementReport {
        region,
        upper,
        lower,
        gap: upper - lower,
        m_double_prime,
        translation,
        hamiltonian,
        consistent: upper >= lower,
    })
}
