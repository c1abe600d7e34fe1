//! Finite-dimensional search space of generators: Fourier modes in space,
//! Bernstein polynomials in time, and an optional harmonic channel.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{HarmonicForm, ScalarField, TorusGrid};
use crate::isotopy::{integrate_flow, DiffeoPath, FlowField, GeneratorPath};

/// One Fourier mode with constant-in-time amplitudes, used to build seeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeAmplitude {
    pub kx: i32,
    pub ky: i32,
    pub cos: f64,
    pub sin: f64,
}

/// `U_t = sum_m c_m(t) cos 2 pi (k_m . x) + s_m(t) sin 2 pi (k_m . x)` over
/// the half-plane modes with `0 <= kx < m_cut`, `|ky| < m_cut`, and
/// `H_t = (a(t), b(t))`; every time profile is a Bernstein polynomial with
/// `coeffs` coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Parametrization {
    modes: Vec<(i32, i32)>,
    coeffs: usize,
    harmonic: bool,
    binom: Vec<f64>,
}

impl Parametrization {
    pub fn new(m_cut: usize, coeffs: usize, harmonic: bool) -> Result<Self> {
        if m_cut < 2 {
            return Err(Error::InvalidArgument("m_cut must be >= 2".into()));
        }
        if coeffs < 1 {
            return Err(Error::InvalidArgument(
                "need at least one temporal coefficient".into(),
            ));
        }
        let m = m_cut as i32;
        let mut modes = Vec::new();
        for kx in 0..m {
            for ky in -(m - 1)..m {
                if kx > 0 || ky > 0 {
                    modes.push((kx, ky));
                }
            }
        }
        let deg = coeffs - 1;
        let binom = (0..=deg)
            .map(|j| (0..j).fold(1.0, |acc, i| acc * (deg - i) as f64 / (i + 1) as f64))
            .collect();
        Ok(Self {
            modes,
            coeffs,
            harmonic,
            binom,
        })
    }

    pub fn modes(&self) -> &[(i32, i32)] {
        &self.modes
    }

    pub fn coeffs(&self) -> usize {
        self.coeffs
    }

    pub fn has_harmonic(&self) -> bool {
        self.harmonic
    }

    /// Number of time profiles (two per mode, plus two harmonic ones).
    pub fn channels(&self) -> usize {
        2 * self.modes.len() + if self.harmonic { 2 } else { 0 }
    }

    pub fn dim(&self) -> usize {
        self.channels() * self.coeffs
    }

    fn bernstein(&self, t: f64) -> Vec<f64> {
        let deg = self.coeffs - 1;
        (0..=deg)
            .map(|j| self.binom[j] * t.powi(j as i32) * (1.0 - t).powi((deg - j) as i32))
            .collect()
    }

    /// All channel values at time `t`.
    pub fn channel_values(&self, theta: &[f64], t: f64) -> Vec<f64> {
        let b = self.bernstein(t);
        theta
            .chunks(self.coeffs)
            .map(|c| c.iter().zip(&b).map(|(x, w)| x * w).sum())
            .collect()
    }

    /// Constant-in-time parameters reproducing the given modes and harmonic part.
    pub fn encode_constant(&self, amps: &[ModeAmplitude], h: HarmonicForm) -> Result<Vec<f64>> {
        let mut theta = vec![0.0; self.dim()];
        let q = self.coeffs;
        for a in amps {
            // (-k) is the same mode with the sine flipped
            let (key, sign) = if a.kx > 0 || (a.kx == 0 && a.ky > 0) {
                ((a.kx, a.ky), 1.0)
            } else {
                ((-a.kx, -a.ky), -1.0)
            };
            let m = self.modes.iter().position(|&k| k == key).ok_or_else(|| {
                Error::InvalidArgument(format!("mode ({}, {}) outside the cutoff", a.kx, a.ky))
            })?;
            for j in 0..q {
                theta[2 * m * q + j] += a.cos;
                theta[(2 * m + 1) * q + j] += sign * a.sin;
            }
        }
        if h != HarmonicForm::ZERO {
            if !self.harmonic {
                return Err(Error::InvalidArgument(
                    "parametrization has no harmonic channel".into(),
                ));
            }
            let base = 2 * self.modes.len() * q;
            for j in 0..q {
                theta[base + j] = h.a;
                theta[base + q + j] = h.b;
            }
        }
        Ok(theta)
    }

    /// Generator sampled on `grid` at `samples + 1` uniform times.
    pub fn decode(&self, theta: &[f64], grid: TorusGrid, samples: usize) -> Result<GeneratorPath> {
        self.check(theta)?;
        let table = ModeTable::new(self, grid);
        GeneratorPath::from_fn(grid, samples, |t| {
            let ch = self.channel_values(theta, t);
            (table.potential(&ch), self.harmonic_at(&ch))
        })
    }

    fn harmonic_at(&self, ch: &[f64]) -> HarmonicForm {
        if self.harmonic {
            let base = 2 * self.modes.len();
            HarmonicForm::new(ch[base], ch[base + 1])
        } else {
            HarmonicForm::ZERO
        }
    }

    pub(crate) fn check(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.dim() {
            return Err(Error::Mismatch(format!(
                "expected {} parameters, got {}",
                self.dim(),
                theta.len()
            )));
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField);
        }
        Ok(())
    }
}

/// Grid values of every `cos` and `sin` mode.
pub(crate) struct ModeTable {
    grid: TorusGrid,
    cos: Vec<Vec<f64>>,
    sin: Vec<Vec<f64>>,
}

impl ModeTable {
    pub(crate) fn new(p: &Parametrization, grid: TorusGrid) -> Self {
        let mut cos = Vec::with_capacity(p.modes.len());
        let mut sin = Vec::with_capacity(p.modes.len());
        for &(kx, ky) in &p.modes {
            let phase: Vec<f64> = (0..grid.len())
                .map(|i| {
                    let (x, y) = grid.coords(i);
                    2.0 * PI * (kx as f64 * x + ky as f64 * y)
                })
                .collect();
            cos.push(phase.iter().map(|t| t.cos()).collect());
            sin.push(phase.iter().map(|t| t.sin()).collect());
        }
        Self { grid, cos, sin }
    }

    pub(crate) fn potential(&self, ch: &[f64]) -> ScalarField {
        let mut values = vec![0.0; self.grid.len()];
        for (m, (c, s)) in self.cos.iter().zip(&self.sin).enumerate() {
            let (a, b) = (ch[2 * m], ch[2 * m + 1]);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            for i in 0..values.len() {
                values[i] += a * c[i] + b * s[i];
            }
        }
        ScalarField {
            grid: self.grid,
            values,
        }
    }
}

/// The decoded vector field evaluated in closed form at any point. Channel
/// values are tabulated at the RK4 stage times of a fixed step count.
pub struct AnalyticFlow<'a> {
    param: &'a Parametrization,
    theta: &'a [f64],
    table: Vec<Vec<f64>>,
    half_steps: usize,
    kmax: usize,
}

impl<'a> AnalyticFlow<'a> {
    pub fn new(param: &'a Parametrization, theta: &'a [f64], steps: usize) -> Self {
        let half_steps = 2 * steps;
        let table = (0..=half_steps)
            .map(|i| param.channel_values(theta, i as f64 / half_steps as f64))
            .collect();
        let kmax = param
            .modes
            .iter()
            .map(|&(kx, ky)| kx.unsigned_abs().max(ky.unsigned_abs()) as usize)
            .max()
            .unwrap_or(0);
        Self {
            param,
            theta,
            table,
            half_steps,
            kmax,
        }
    }

    fn channels(&self, t: f64) -> std::borrow::Cow<'_, [f64]> {
        let pos = t * self.half_steps as f64;
        let idx = pos.round();
        if (pos - idx).abs() < 1e-9 && idx >= 0.0 && idx as usize <= self.half_steps {
            std::borrow::Cow::Borrowed(&self.table[idx as usize])
        } else {
            std::borrow::Cow::Owned(self.param.channel_values(self.theta, t))
        }
    }
}

impl FlowField for AnalyticFlow<'_> {
    fn velocity(&self, t: f64, x: f64, y: f64) -> (f64, f64) {
        let ch = self.channels(t);
        let (sx, cx) = (2.0 * PI * x).sin_cos();
        let (sy, cy) = (2.0 * PI * y).sin_cos();
        // powers e^{2 pi i k x} for k = 0..=kmax and e^{2 pi i k y} for |k| <= kmax
        let mut px = [(1.0, 0.0); 8];
        let mut py = [(1.0, 0.0); 8];
        for k in 1..=self.kmax {
            let (a, b) = px[k - 1];
            px[k] = (a * cx - b * sx, a * sx + b * cx);
            let (a, b) = py[k - 1];
            py[k] = (a * cy - b * sy, a * sy + b * cy);
        }
        let mut ux = 0.0;
        let mut uy = 0.0;
        for (m, &(kx, ky)) in self.param.modes.iter().enumerate() {
            let (c, s) = (ch[2 * m], ch[2 * m + 1]);
            if c == 0.0 && s == 0.0 {
                continue;
            }
            let (ar, ai) = px[kx as usize];
            let (br, bi) = py[ky.unsigned_abs() as usize];
            let bi = if ky < 0 { -bi } else { bi };
            let (re, im) = (ar * br - ai * bi, ar * bi + ai * br);
            // d/dphase of c cos + s sin
            let g = -c * im + s * re;
            ux += kx as f64 * g;
            uy += ky as f64 * g;
        }
        ux *= 2.0 * PI;
        uy *= 2.0 * PI;
        let h = self.param.harmonic_at(&ch);
        (uy + h.b, -(ux + h.a))
    }
}

/// Flow of the decoded generator from the closed-form field.
pub fn integrate_decoded(
    param: &Parametrization,
    theta: &[f64],
    grid: TorusGrid,
    samples: usize,
    substeps: usize,
) -> Result<DiffeoPath> {
    param.check(theta)?;
    if param
        .modes
        .iter()
        .any(|&(kx, ky)| kx.unsigned_abs().max(ky.unsigned_abs()) >= 8)
    {
        return Err(Error::InvalidArgument(
            "closed-form flow supports |k| < 8".into(),
        ));
    }
    let flow = AnalyticFlow::new(param, theta, samples * substeps);
    integrate_flow(&flow, grid, samples, substeps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isotopy::integrate_generator;

    #[test]
    fn mode_count() {
        assert_eq!(Parametrization::new(3, 6, false).unwrap().modes().len(), 12);
        assert_eq!(Parametrization::new(3, 6, true).unwrap().dim(), 26 * 6);
        assert!(Parametrization::new(1, 6, true).is_err());
    }

    #[test]
    fn bernstein_partition_of_unity() {
        let p = Parametrization::new(2, 6, true).unwrap();
        for t in [0.0, 0.3, 1.0] {
            assert!((p.bernstein(t).iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn decode_constant_seed() {
        let grid = TorusGrid::new(32).unwrap();
        let p = Parametrization::new(3, 6, true).unwrap();
        let amps = [
            ModeAmplitude {
                kx: 0,
                ky: 1,
                cos: 0.3,
                sin: 0.0,
            },
            ModeAmplitude {
                kx: -1,
                ky: -2,
                cos: 0.0,
                sin: 0.1,
            },
        ];
        let theta = p
            .encode_constant(&amps, HarmonicForm::new(0.2, 0.0))
            .unwrap();
        let gen = p.decode(&theta, grid, 16).unwrap();
        let want = ScalarField::from_fn(grid, |x, y| {
            0.3 * (2.0 * PI * y).cos() + 0.1 * (2.0 * PI * (-x - 2.0 * y)).sin()
        });
        for k in [0, 7, 16] {
            assert!(gen.u()[k]
                .values
                .iter()
                .zip(&want.values)
                .all(|(a, b)| (a - b).abs() < 1e-13));
            assert!((gen.h()[k].a - 0.2).abs() < 1e-14);
        }
        assert!(p
            .encode_constant(
                &[ModeAmplitude {
                    kx: 3,
                    ky: 0,
                    cos: 1.0,
                    sin: 0.0
                }],
                HarmonicForm::ZERO
            )
            .is_err());
    }

    #[test]
    fn closed_form_flow_matches_grid_flow() {
        let grid = TorusGrid::new(64).unwrap();
        let p = Parametrization::new(3, 4, true).unwrap();
        let mut theta = vec![0.0; p.dim()];
        for (i, v) in theta.iter_mut().enumerate() {
            *v = 0.02 * ((i * 7919) % 13) as f64 / 13.0 - 0.01;
        }
        let a = integrate_decoded(&p, &theta, grid, 16, 4).unwrap();
        let b = integrate_generator(&p.decode(&theta, grid, 16).unwrap(), 4).unwrap();
        // the grid flow carries the O(h^4) error of cubic interpolation
        let e = a.endpoint().max_abs_diff(b.endpoint());
        assert!(e < 5e-5, "{e}");
    }
}
