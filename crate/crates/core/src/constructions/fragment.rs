//! Splitting a harmonic isotopy into pieces `H_{k,t} = nu_k H_t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::quadrature_weight;
use crate::grid::{HarmonicForm, TorusGrid};
use crate::isotopy::{compose_paths, integrate_generator, DiffeoPath, FluxClass, GeneratorPath};
use crate::lattice::distance_to_lattice;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    /// `nu_k = C / k^2`.
    InverseSquare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentationPlan {
    /// `nu_1 ..= nu_K`, summing to 1.
    pub weights: Vec<f64>,
    pub epsilon: f64,
    /// Least `n` (1-based) with `sum_{k > n} nu_k <= epsilon` and
    /// `nu_k <= epsilon` for all `k >= n`.
    pub n0: Option<usize>,
    h: Vec<HarmonicForm>,
}

pub fn fragment(
    h: &[HarmonicForm],
    kind: WeightKind,
    pieces: usize,
    epsilon: f64,
) -> Result<FragmentationPlan> {
    if pieces < 2 {
        return Err(Error::InvalidArgument("need at least 2 pieces".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    if h.len() < 2 {
        return Err(Error::InvalidArgument(
            "harmonic family needs at least 2 samples".into(),
        ));
    }
    let raw: Vec<f64> = match kind {
        WeightKind::InverseSquare => (1..=pieces).map(|k| 1.0 / (k * k) as f64).collect(),
    };
    // summing smallest first keeps the normalization error at one ulp level
    let total: f64 = raw.iter().rev().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let mut n0 = None;
    let mut tail = 0.0;
    let mut all_small = true;
    for n in (1..=pieces).rev() {
        // tail = sum_{k > n} nu_k; all_small = nu_k <= eps for k >= n
        all_small &= weights[n - 1] <= epsilon;
        if tail <= epsilon && all_small {
            n0 = Some(n);
        } else {
            break;
        }
        tail += weights[n - 1];
    }
    Ok(FragmentationPlan {
        weights,
        epsilon,
        n0,
        h: h.to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PieceFlux {
    pub k: usize,
    pub weight: f64,
    pub flux: FluxClass,
    pub lattice_distance: f64,
}

impl FragmentationPlan {
    pub fn pieces(&self) -> usize {
        self.weights.len()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().rev().sum()
    }

    pub fn family(&self) -> &[HarmonicForm] {
        &self.h
    }

    /// `nu_k H_t` for the 1-based piece `k`.
    pub fn piece(&self, k: usize) -> Vec<HarmonicForm> {
        let w = self.weights[k - 1];
        self.h.iter().map(|h| h.scaled(w)).collect()
    }

    pub fn piece_generator(&self, grid: TorusGrid, k: usize) -> Result<GeneratorPath> {
        let piece = self.piece(k);
        let samples = piece.len() - 1;
        GeneratorPath::harmonic(grid, samples, |t| {
            piece[(t * samples as f64).round() as usize]
        })
    }

    /// `max_t |sum_k nu_k H_t - H_t|`.
    pub fn harmonic_sum_residual(&self) -> f64 {
        self.h
            .iter()
            .map(|h| {
                let sum = (1..=self.pieces())
                    .rev()
                    .fold(HarmonicForm::ZERO, |acc, k| {
                        acc + h.scaled(self.weights[k - 1])
                    });
                (sum - *h).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Composite flow `rho_K o ... o rho_1` of all pieces.
    pub fn compose_pieces(&self, grid: TorusGrid, substeps: usize) -> Result<DiffeoPath> {
        let mut acc = integrate_generator(&self.piece_generator(grid, 1)?, substeps)?;
        for k in 2..=self.pieces() {
            let next = integrate_generator(&self.piece_generator(grid, k)?, substeps)?;
            acc = compose_paths(&next, &acc)?;
        }
        Ok(acc)
    }
}

/// Flux `nu_k int_0^1 H_t dt` of every piece and its lattice distance.
pub fn fragment_flux_check(plan: &FragmentationPlan) -> Vec<PieceFlux> {
    let samples = plan.h.len() - 1;
    let total = plan
        .h
        .iter()
        .enumerate()
        .fold(FluxClass::ZERO, |acc, (k, h)| {
            acc + FluxClass::from(*h).scaled(quadrature_weight(k, samples))
        });
    plan.weights
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let flux = total.scaled(*w);
            PieceFlux {
                k: i + 1,
                weight: *w,
                flux,
                lattice_distance: distance_to_lattice(flux),
            }
        })
        .collect()
}
