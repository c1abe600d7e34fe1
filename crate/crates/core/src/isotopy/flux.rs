use serde::{Deserialize, Serialize};

use super::{DiffeoPath, GeneratorPath};
use crate::calculus::jacobian;
use crate::error::{Error, Result};
use crate::fd::quadrature_weight;
use crate::grid::HarmonicForm;
use crate::par;

/// Real cohomology class `a [dx] + b [dy]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FluxClass {
    pub a: f64,
    pub b: f64,
}

impl FluxClass {
    pub const ZERO: FluxClass = FluxClass { a: 0.0, b: 0.0 };

    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn norm(&self) -> f64 {
        self.a.hypot(self.b)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::new(c * self.a, c * self.b)
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }

    /// Largest coordinate difference.
    pub fn distance(&self, other: &FluxClass) -> f64 {
        (self.a - other.a).abs().max((self.b - other.b).abs())
    }
}

impl From<HarmonicForm> for FluxClass {
    fn from(h: HarmonicForm) -> Self {
        Self::new(h.a, h.b)
    }
}

impl From<FluxClass> for HarmonicForm {
    fn from(f: FluxClass) -> Self {
        HarmonicForm::new(f.a, f.b)
    }
}

impl std::ops::Add for FluxClass {
    type Output = FluxClass;
    fn add(self, o: FluxClass) -> FluxClass {
        FluxClass::new(self.a + o.a, self.b + o.b)
    }
}

impl std::ops::Sub for FluxClass {
    type Output = FluxClass;
    fn sub(self, o: FluxClass) -> FluxClass {
        FluxClass::new(self.a - o.a, self.b - o.b)
    }
}

impl std::ops::Neg for FluxClass {
    type Output = FluxClass;
    fn neg(self) -> FluxClass {
        FluxClass::new(-self.a, -self.b)
    }
}

/// `int_0^1 H_t dt` on the generator's samples.
pub fn flux_cohomological(gen: &GeneratorPath) -> FluxClass {
    let samples = gen.samples();
    gen.h()
        .iter()
        .enumerate()
        .fold(FluxClass::ZERO, |acc, (k, h)| {
            acc + FluxClass::from(*h).scaled(quadrature_weight(k, samples))
        })
}

/// Flux straight from the maps: the harmonic part of
/// `int_0^1 phi_t^*(iota_{X_t} omega) dt`. At each sample the pulled-back
/// form is `omega(dphi_t/dt, Dphi_t .)`, so no inverse is needed; its
/// harmonic part is the grid mean. Time derivatives are fourth order.
pub fn flux_definition(path: &DiffeoPath) -> Result<FluxClass> {
    let samples = path.samples();
    let terms = (0..=samples)
        .map(|k| {
            let (vx, vy) = path.velocity_at_sample(k);
            let [j11, j12, j21, j22] = jacobian(path.at(k));
            let len = vx.len();
            let ea: Vec<f64> = (0..len).map(|i| vx[i] * j21[i] - vy[i] * j11[i]).collect();
            let eb: Vec<f64> = (0..len).map(|i| vx[i] * j22[i] - vy[i] * j12[i]).collect();
            FluxClass::new(par::sum(&ea) / len as f64, par::sum(&eb) / len as f64)
        })
        .collect::<Vec<_>>();
    let flux = terms
        .iter()
        .enumerate()
        .fold(FluxClass::ZERO, |acc, (k, f)| {
            acc + f.scaled(quadrature_weight(k, samples))
        });
    if !flux.is_finite() {
        return Err(Error::NonFiniteField);
    }
    Ok(flux)
}

/// Whether `phi_1` is the identity of `T^2` to within `tol`.
pub fn is_loop(path: &DiffeoPath, tol: f64) -> bool {
    path.endpoint().reduced_sup() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Displacement, TorusGrid};
    use crate::isotopy::integrate_generator;
    use std::f64::consts::PI;

    #[test]
    fn cohomological_examples() {
        let grid = TorusGrid::new(16).unwrap();
        let ham = GeneratorPath::from_potential(grid, 16, |_, x, _| (2.0 * PI * x).sin()).unwrap();
        assert_eq!(flux_cohomological(&ham), FluxClass::ZERO);
        let dy = GeneratorPath::harmonic(grid, 16, |_| HarmonicForm::new(0.0, 1.0)).unwrap();
        assert!(flux_cohomological(&dy).distance(&FluxClass::new(0.0, 1.0)) < 1e-15);
        let sine = GeneratorPath::harmonic(grid, 4096, |t| HarmonicForm::new((PI * t).sin(), 0.0))
            .unwrap();
        assert!(flux_cohomological(&sine).distance(&FluxClass::new(2.0 / PI, 0.0)) < 1e-7);
    }

    #[test]
    fn definition_examples() {
        let grid = TorusGrid::new(32).unwrap();
        let id = DiffeoPath::identity(grid, 16).unwrap();
        assert_eq!(flux_definition(&id).unwrap(), FluxClass::ZERO);
        let tr =
            DiffeoPath::from_fn(grid, 16, |t| Displacement::translation(grid, t, 0.0)).unwrap();
        assert!(
            flux_definition(&tr)
                .unwrap()
                .distance(&FluxClass::new(0.0, 1.0))
                < 1e-12
        );
        let ham =
            GeneratorPath::from_potential(grid, 32, |_, _, y| 0.3 * (2.0 * PI * y).cos()).unwrap();
        let path = integrate_generator(&ham, 4).unwrap();
        assert!(flux_definition(&path).unwrap().norm() < 1e-5);
    }

    #[test]
    fn loops() {
        let grid = TorusGrid::new(16).unwrap();
        let looped =
            DiffeoPath::from_fn(grid, 16, |t| Displacement::translation(grid, 2.0 * t, -t))
                .unwrap();
        assert!(is_loop(&looped, 1e-12));
        let half = DiffeoPath::from_fn(grid, 16, |t| Displacement::translation(grid, 0.5 * t, 0.0))
            .unwrap();
        assert!(!is_loop(&half, 0.1));
        assert!(is_loop(&DiffeoPath::identity(grid, 16).unwrap(), 0.0));
    }
}
