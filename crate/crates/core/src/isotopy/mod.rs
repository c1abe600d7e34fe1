//! Time-dependent symplectic flows on the torus.
//!
//! Paths are sampled at `T + 1` uniform times on `[0, 1]`. A
//! [`GeneratorPath`] stores the Hodge data `(U_t, H_t)` of `iota_{X_t} omega`,
//! a [`DiffeoPath`] stores the maps `phi_t` through unreduced displacements.

mod flow;
mod flux;
mod ops;
mod recover;

pub use flow::{
    integrate_flow, integrate_generator, integrate_generator_with, FlowField, GeneratorFlow,
};
pub use flux::{flux_cohomological, flux_definition, is_loop, FluxClass};
pub use ops::{
    compose_maps, compose_paths, concatenate_generators, concatenate_left, invert_diffeo, plateau,
    plateau_rate, reverse_path, DEFAULT_DELTA,
};
pub use recover::{eulerian_velocity, recover_generator, INVERSE_TOL};

use serde::{Deserialize, Serialize};

use crate::calculus::{exterior_derivative, sharp_omega};
use crate::error::{Error, Result};
use crate::grid::{
    Displacement, HarmonicForm, OneFormField, ScalarField, TorusGrid, VectorFieldField,
};
use crate::interp::{blend, time_weights};

/// Smallest number of time intervals a generator path may carry.
pub const MIN_GENERATOR_SAMPLES: usize = 16;
/// Smallest number of time intervals a diffeotopy may carry (the
/// fourth-order time differences need five samples).
pub const MIN_PATH_SAMPLES: usize = 4;

const MEAN_TOL: f64 = 1e-12;

/// `(U_t, H_t)` at `T + 1` uniform times.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorPath {
    grid: TorusGrid,
    u: Vec<ScalarField>,
    h: Vec<HarmonicForm>,
}

impl GeneratorPath {
    pub fn new(u: Vec<ScalarField>, h: Vec<HarmonicForm>) -> Result<Self> {
        if u.len() != h.len() {
            return Err(Error::Mismatch(format!(
                "{} potentials but {} harmonic parts",
                u.len(),
                h.len()
            )));
        }
        if u.len() < MIN_GENERATOR_SAMPLES + 1 {
            return Err(Error::InvalidArgument(format!(
                "generator needs at least {} time intervals, got {}",
                MIN_GENERATOR_SAMPLES,
                u.len().saturating_sub(1)
            )));
        }
        let grid = u[0].grid;
        for f in &u {
            if f.grid != grid {
                return Err(Error::Mismatch(
                    "generator samples on different grids".into(),
                ));
            }
            if !f.is_finite() {
                return Err(Error::NonFiniteField);
            }
            if f.mean().abs() > MEAN_TOL * f.max_abs().max(1.0) {
                return Err(Error::InvalidArgument(
                    "generator potential is not mean-zero".into(),
                ));
            }
        }
        if h.iter().any(|h| !h.a.is_finite() || !h.b.is_finite()) {
            return Err(Error::NonFiniteField);
        }
        Ok(Self { grid, u, h })
    }

    /// Sample `f(t)` at `t = k / samples`; potentials are normalized.
    pub fn from_fn(
        grid: TorusGrid,
        samples: usize,
        f: impl Fn(f64) -> (ScalarField, HarmonicForm),
    ) -> Result<Self> {
        let (u, h) = (0..=samples)
            .map(|k| {
                let (u, h) = f(k as f64 / samples as f64);
                (u.normalized(), h)
            })
            .unzip();
        let gen = Self::new(u, h)?;
        if gen.grid != grid {
            return Err(Error::Mismatch(
                "sampled potential lives on another grid".into(),
            ));
        }
        Ok(gen)
    }

    /// Autonomous generator built from a potential given on the grid.
    pub fn from_potential(
        grid: TorusGrid,
        samples: usize,
        u: impl Fn(f64, f64, f64) -> f64,
    ) -> Result<Self> {
        Self::from_fn(grid, samples, |t| {
            (
                ScalarField::from_fn(grid, |x, y| u(t, x, y)),
                HarmonicForm::ZERO,
            )
        })
    }

    /// Purely harmonic generator `U = 0`, `H_t = h(t)`.
    pub fn harmonic(
        grid: TorusGrid,
        samples: usize,
        h: impl Fn(f64) -> HarmonicForm,
    ) -> Result<Self> {
        Self::from_fn(grid, samples, |t| (ScalarField::zeros(grid), h(t)))
    }

    pub fn zero(grid: TorusGrid, samples: usize) -> Result<Self> {
        Self::harmonic(grid, samples, |_| HarmonicForm::ZERO)
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    /// Number of time intervals `T`.
    pub fn samples(&self) -> usize {
        self.u.len() - 1
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 / self.samples() as f64
    }

    pub fn u(&self) -> &[ScalarField] {
        &self.u
    }

    pub fn h(&self) -> &[HarmonicForm] {
        &self.h
    }

    /// `alpha_k = dU_k + H_k`.
    pub fn alpha(&self, k: usize) -> OneFormField {
        let du = exterior_derivative(&self.u[k]);
        let h = self.h[k];
        OneFormField {
            grid: self.grid,
            a: du.a.into_iter().map(|v| v + h.a).collect(),
            b: du.b.into_iter().map(|v| v + h.b).collect(),
        }
    }

    /// `X_k` with `iota_{X_k} omega = alpha_k`.
    pub fn velocity(&self, k: usize) -> VectorFieldField {
        sharp_omega(&self.alpha(k))
    }

    /// Potential at an arbitrary time (4-point Lagrange in `t`).
    pub fn u_at(&self, t: f64) -> ScalarField {
        let (s, w) = time_weights(t, self.samples());
        let fields = [
            &self.u[s].values[..],
            &self.u[s + 1].values[..],
            &self.u[s + 2].values[..],
            &self.u[s + 3].values[..],
        ];
        ScalarField {
            grid: self.grid,
            values: blend(&fields, &w),
        }
    }

    pub fn h_at(&self, t: f64) -> HarmonicForm {
        let (s, w) = time_weights(t, self.samples());
        (0..4).fold(HarmonicForm::ZERO, |acc, m| {
            acc + self.h[s + m].scaled(w[m])
        })
    }

    /// Largest `|H_t|` over samples.
    pub fn harmonic_sup(&self) -> f64 {
        self.h.iter().fold(0.0, |m, h| m.max(h.norm()))
    }

    /// Largest `|U_t|_inf` over samples.
    pub fn potential_sup(&self) -> f64 {
        self.u.iter().fold(0.0, |m, u| m.max(u.max_abs()))
    }

    pub fn is_hamiltonian(&self, tol: f64) -> bool {
        self.harmonic_sup() <= tol
    }

    pub fn is_harmonic(&self, tol: f64) -> bool {
        self.potential_sup() <= tol
    }

    /// Same path with every sample multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            u: self.u.iter().map(|u| u.scaled(c)).collect(),
            h: self.h.iter().map(|h| h.scaled(c)).collect(),
        }
    }

    /// Largest sup-norm difference in `U` and in `H` against another path
    /// with the same sampling.
    pub fn max_diff(&self, other: &GeneratorPath) -> Result<(f64, f64)> {
        if self.grid != other.grid || self.samples() != other.samples() {
            return Err(Error::Mismatch("generator sampling differs".into()));
        }
        let mut du = 0.0f64;
        let mut dh = 0.0f64;
        for k in 0..=self.samples() {
            for (a, b) in self.u[k].values.iter().zip(&other.u[k].values) {
                du = du.max((a - b).abs());
            }
            dh = dh.max((self.h[k] - other.h[k]).norm());
        }
        Ok((du, dh))
    }
}

/// How a diffeotopy was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathSource {
    Integrated,
    Composed,
    Concatenated,
    Reversed,
    Sampled,
}

/// `phi_t = Id + D_t` at `T + 1` uniform times, with `D_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffeoPath {
    grid: TorusGrid,
    disp: Vec<Displacement>,
    source: PathSource,
}

impl DiffeoPath {
    pub fn new(disp: Vec<Displacement>, source: PathSource) -> Result<Self> {
        if disp.len() < MIN_PATH_SAMPLES + 1 {
            return Err(Error::InvalidArgument(format!(
                "path needs at least {} time intervals",
                MIN_PATH_SAMPLES
            )));
        }
        let grid = disp[0].grid;
        if disp.iter().any(|d| d.grid != grid) {
            return Err(Error::Mismatch("path samples on different grids".into()));
        }
        if disp.iter().any(|d| !d.is_finite()) {
            return Err(Error::NonFiniteField);
        }
        if disp[0].max_abs() > 1e-12 {
            return Err(Error::InvalidArgument(
                "path does not start at the identity".into(),
            ));
        }
        Ok(Self { grid, disp, source })
    }

    /// Sample `f(t)` at `t = k / samples`.
    pub fn from_fn(
        grid: TorusGrid,
        samples: usize,
        f: impl Fn(f64) -> Displacement,
    ) -> Result<Self> {
        let disp: Vec<Displacement> = (0..=samples)
            .map(|k| f(k as f64 / samples as f64))
            .collect();
        if disp.iter().any(|d| d.grid != grid) {
            return Err(Error::Mismatch("sampled map lives on another grid".into()));
        }
        Self::new(disp, PathSource::Sampled)
    }

    pub fn identity(grid: TorusGrid, samples: usize) -> Result<Self> {
        Self::from_fn(grid, samples, |_| Displacement::identity(grid))
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn samples(&self) -> usize {
        self.disp.len() - 1
    }

    pub fn source(&self) -> PathSource {
        self.source
    }

    pub fn displacements(&self) -> &[Displacement] {
        &self.disp
    }

    pub fn at(&self, k: usize) -> &Displacement {
        &self.disp[k]
    }

    pub fn endpoint(&self) -> &Displacement {
        &self.disp[self.samples()]
    }

    /// `phi_t` at an arbitrary time (4-point Lagrange in `t`).
    pub fn at_time(&self, t: f64) -> Displacement {
        let samples = self.samples();
        let tau = t * samples as f64;
        if (tau - tau.round()).abs() < 1e-12 && tau.round() >= 0.0 && tau.round() <= samples as f64
        {
            return self.disp[tau.round() as usize].clone();
        }
        let (s, w) = time_weights(t, samples);
        let d = &self.disp;
        Displacement {
            grid: self.grid,
            dx: blend(
                &[
                    &d[s].dx[..],
                    &d[s + 1].dx[..],
                    &d[s + 2].dx[..],
                    &d[s + 3].dx[..],
                ],
                &w,
            ),
            dy: blend(
                &[
                    &d[s].dy[..],
                    &d[s + 1].dy[..],
                    &d[s + 2].dy[..],
                    &d[s + 3].dy[..],
                ],
                &w,
            ),
        }
    }

    /// Time derivative of the displacement at sample `k`.
    pub fn velocity_at_sample(&self, k: usize) -> (Vec<f64>, Vec<f64>) {
        let dt = 1.0 / self.samples() as f64;
        let dx: Vec<&[f64]> = self.disp.iter().map(|d| &d.dx[..]).collect();
        let dy: Vec<&[f64]> = self.disp.iter().map(|d| &d.dy[..]).collect();
        (
            crate::fd::derivative(&dx, k, dt),
            crate::fd::derivative(&dy, k, dt),
        )
    }
}
