//! The flux group of the unit torus, `Z^2` inside `H^1(T^2; R) = R^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isotopy::FluxClass;

/// A lattice in `R^2` given by up to two basis vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub basis: Vec<[f64; 2]>,
}

impl LatticeSpec {
    /// `Z^2` in the `{dx, dy}` coordinates.
    pub fn standard() -> Self {
        Self {
            basis: vec![[1.0, 0.0], [0.0, 1.0]],
        }
    }

    pub fn scaled(s: f64) -> Self {
        Self {
            basis: vec![[s, 0.0], [0.0, s]],
        }
    }

    pub fn trivial() -> Self {
        Self { basis: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Smallest nonzero norm among the neighbours `sum c_i e_i`,
    /// `c_i in {-1, 0, 1}`, of the origin.
    pub fn min_norm(&self) -> Result<f64> {
        if self.basis.is_empty() {
            return Err(Error::TrivialLattice);
        }
        let r = self.rank();
        let mut best = f64::INFINITY;
        for code in 0..3usize.pow(r as u32) {
            let mut v = [0.0; 2];
            let mut c = code;
            for e in &self.basis {
                let coef = (c % 3) as f64 - 1.0;
                c /= 3;
                v[0] += coef * e[0];
                v[1] += coef * e[1];
            }
            let norm = v[0].hypot(v[1]);
            if norm > 0.0 {
                best = best.min(norm);
            }
        }
        Ok(best)
    }
}

/// `m`, the minimal nonzero norm of the flux group.
pub fn lattice_min_norm() -> f64 {
    LatticeSpec::standard()
        .min_norm()
        .expect("standard lattice has rank 2")
}

/// Euclidean distance to the nearest integer point.
pub fn distance_to_lattice(v: FluxClass) -> f64 {
    (v.a - v.a.round()).hypot(v.b - v.b.round())
}

pub fn is_in_lattice(v: FluxClass, tol: f64) -> Result<bool> {
    if !(tol < 0.5) {
        return Err(Error::ToleranceTooLarge);
    }
    Ok(distance_to_lattice(v) <= tol)
}

/// Empirical constants `A <= e / |flux| <= B` over candidate energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityBounds {
    pub a_hat: f64,
    pub b_hat: f64,
}

pub fn duality_bounds(flux: FluxClass, candidates: &[f64]) -> Result<DualityBounds> {
    let norm = flux.norm();
    if norm == 0.0 {
        return Err(Error::ZeroFlux);
    }
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no candidate energies".into()));
    }
    let lo = candidates.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = candidates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(DualityBounds {
        a_hat: lo / norm,
        b_hat: hi / norm,
    })
}

/// Lattice distances of the iterates' fluxes `k * flux`, `k = 1..=k_max`,
/// and their minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateBound {
    pub distances: Vec<f64>,
    pub floor: f64,
}

/// Tolerance for calling a flux integral when bounding iterates.
pub const ITERATE_LATTICE_TOL: f64 = 1e-6;

pub fn iterate_lower_bound(flux: FluxClass, k_max: usize) -> Result<IterateBound> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be >= 1".into()));
    }
    if distance_to_lattice(flux) <= ITERATE_LATTICE_TOL {
        return Err(Error::LatticeFlux);
    }
    let distances: Vec<f64> = (1..=k_max)
        .map(|k| distance_to_lattice(flux.scaled(k as f64)))
        .collect();
    let floor = distances.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(IterateBound { distances, floor })
}

/// Flux floor for the energy of a non-identity map: `min{m, |flux|}` and
/// the same value times `1 / (2 sqrt(Vol))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxFloor {
    pub raw: f64,
    pub prefactored: f64,
}

pub fn flux_floor(flux: FluxClass, volume: f64) -> Result<FluxFloor> {
    if !(volume > 0.0) {
        return Err(Error::InvalidArgument("volume must be positive".into()));
    }
    let raw = lattice_min_norm().min(flux.norm());
    Ok(FluxFloor {
        raw,
        prefactored: raw / (2.0 * volume.sqrt()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_norm() {
        assert_eq!(lattice_min_norm(), 1.0);
        assert_eq!(LatticeSpec::scaled(2.0).min_norm().unwrap(), 2.0);
        assert_eq!(
            LatticeSpec::trivial().min_norm(),
            Err(Error::TrivialLattice)
        );
        let skew = LatticeSpec {
            basis: vec![[1.0, 0.0], [0.9, 0.1]],
        };
        assert!((skew.min_norm().unwrap() - 0.1f64.hypot(0.1)).abs() < 1e-15);
    }

    #[test]
    fn distances() {
        assert_eq!(distance_to_lattice(FluxClass::new(2.0, -3.0)), 0.0);
        assert_eq!(distance_to_lattice(FluxClass::new(0.5, 0.0)), 0.5);
        assert!((distance_to_lattice(FluxClass::new(0.5, 0.5)) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(is_in_lattice(FluxClass::new(1.0, 1.0), 1e-9).unwrap());
        assert!(!is_in_lattice(FluxClass::new(0.3, 0.0), 0.1).unwrap());
        assert_eq!(
            is_in_lattice(FluxClass::ZERO, 0.5),
            Err(Error::ToleranceTooLarge)
        );
    }

    #[test]
    fn duality() {
        let f = FluxClass::new(0.0, 0.4);
        let d = duality_bounds(f, &[0.4]).unwrap();
        assert!((d.a_hat - 1.0).abs() < 1e-15 && (d.b_hat - 1.0).abs() < 1e-15);
        assert!(duality_bounds(f, &[0.5, 0.7]).unwrap().a_hat >= 1.0);
        assert_eq!(
            duality_bounds(FluxClass::ZERO, &[1.0]),
            Err(Error::ZeroFlux)
        );
    }

    #[test]
    fn iterates() {
        let b = iterate_lower_bound(FluxClass::new(0.5, 0.0), 4).unwrap();
        assert_eq!(b.distances, vec![0.5, 0.0, 0.5, 0.0]);
        assert_eq!(b.floor, 0.0);
        let b = iterate_lower_bound(FluxClass::new(2f64.sqrt() / 10.0, 0.0), 20).unwrap();
        assert!(b.floor > 0.0);
        let b = iterate_lower_bound(FluxClass::new(0.5, 0.5), 2).unwrap();
        assert_eq!(b.distances[1], 0.0);
        assert_eq!(
            iterate_lower_bound(FluxClass::new(1.0, 0.0), 3),
            Err(Error::LatticeFlux)
        );
    }

    #[test]
    fn floor() {
        let f = flux_floor(FluxClass::new(0.0, 0.3), 1.0).unwrap();
        assert_eq!((f.raw, f.prefactored), (0.3, 0.15));
        assert_eq!(flux_floor(FluxClass::new(3.0, 4.0), 1.0).unwrap().raw, 1.0);
    }
}
