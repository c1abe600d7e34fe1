//! Uniform grids on the unit torus and the fields they carry.
//!
//! Node `(i, j)` sits at `(x, y) = (i/N, j/N)` and is stored at index
//! `j * N + i` (row-major, rows along `y`). All fields share this layout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform `N x N` grid on `T^2 = R^2 / Z^2` with the flat metric and
/// `omega = dx ^ dy`. Total area is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusGrid {
    n: usize,
}

impl TorusGrid {
    pub const MIN_N: usize = 8;

    pub fn new(n: usize) -> Result<Self> {
        if n < Self::MIN_N || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "resolution must be even and >= {}, got {n}",
                Self::MIN_N
            )));
        }
        Ok(Self { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Number of nodes, `N^2`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    /// Coordinates of node `idx` in `[0, 1)^2`.
    #[inline]
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let h = self.spacing();
        ((idx % self.n) as f64 * h, (idx / self.n) as f64 * h)
    }

    fn check(&self, other: &TorusGrid) -> Result<()> {
        if self != other {
            return Err(Error::Mismatch(format!(
                "grid N = {} vs N = {}",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

/// Reduce a coordinate to `[0, 1)`.
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Reduce a displacement component to `(-1/2, 1/2]`.
#[inline]
pub fn reduce_half(d: f64) -> f64 {
    let r = d - d.round();
    if r <= -0.5 {
        r + 1.0
    } else {
        r
    }
}

fn sample(grid: TorusGrid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    (0..grid.len())
        .map(|k| {
            let (x, y) = grid.coords(k);
            f(x, y)
        })
        .collect()
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Real-valued function sampled at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: TorusGrid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: TorusGrid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            grid,
            values: sample(grid, f),
        }
    }

    pub fn from_values(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Mismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.values)
    }

    /// Mean over nodes (the discrete `int_M f omega`).
    pub fn mean(&self) -> f64 {
        crate::par::sum(&self.values) / self.values.len() as f64
    }

    /// Copy with the mean removed.
    pub fn normalized(&self) -> Self {
        let m = self.mean();
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v - m).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.grid.check(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// 1-form `a dx + b dy` with node-wise coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct OneFormField {
    pub grid: TorusGrid,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl OneFormField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            a: vec![0.0; grid.len()],
            b: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: TorusGrid, a: f64, b: f64) -> Self {
        Self {
            grid,
            a: vec![a; grid.len()],
            b: vec![b; grid.len()],
        }
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let (a, b) = (0..grid.len())
            .map(|k| {
                let (x, y) = grid.coords(k);
                f(x, y)
            })
            .unzip();
        Self { grid, a, b }
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.a) && all_finite(&self.b)
    }

    pub fn add(&self, other: &OneFormField) -> Result<Self> {
        self.grid.check(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
            b: self.b.iter().zip(&other.b).map(|(x, y)| x + y).collect(),
        })
    }

    pub fn sub(&self, other: &OneFormField) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            a: self.a.iter().map(|v| c * v).collect(),
            b: self.b.iter().map(|v| c * v).collect(),
        }
    }

    /// Sup over nodes of the pointwise flat norm.
    pub fn sup_norm(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    /// Sup over nodes of the coefficient-wise difference.
    pub fn max_abs_diff(&self, other: &OneFormField) -> f64 {
        self.a
            .iter()
            .zip(&other.a)
            .chain(self.b.iter().zip(&other.b))
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }
}

/// Vector field `vx d/dx + vy d/dy` sampled at nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldField {
    pub grid: TorusGrid,
    pub vx: Vec<f64>,
    pub vy: Vec<f64>,
}

impl VectorFieldField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            vx: vec![0.0; grid.len()],
            vy: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: TorusGrid, vx: f64, vy: f64) -> Self {
        Self {
            grid,
            vx: vec![vx; grid.len()],
            vy: vec![vy; grid.len()],
        }
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let (vx, vy) = (0..grid.len())
            .map(|k| {
                let (x, y) = grid.coords(k);
                f(x, y)
            })
            .unzip();
        Self { grid, vx, vy }
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.vx) && all_finite(&self.vy)
    }

    pub fn sup_norm(&self) -> f64 {
        self.vx
            .iter()
            .zip(&self.vy)
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    pub fn max_abs_diff(&self, other: &VectorFieldField) -> f64 {
        self.vx
            .iter()
            .zip(&other.vx)
            .chain(self.vy.iter().zip(&other.vy))
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }
}

/// Torus map `phi(p) = p + D(p)` stored through its periodic displacement
/// `D`. Displacements are kept unreduced so that winding survives (a full
/// turn around a cycle is distinguishable from the identity until reduced).
#[derive(Debug, Clone, PartialEq)]
pub struct Displacement {
    pub grid: TorusGrid,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
}

impl Displacement {
    pub fn identity(grid: TorusGrid) -> Self {
        Self {
            grid,
            dx: vec![0.0; grid.len()],
            dy: vec![0.0; grid.len()],
        }
    }

    pub fn translation(grid: TorusGrid, tx: f64, ty: f64) -> Self {
        Self {
            grid,
            dx: vec![tx; grid.len()],
            dy: vec![ty; grid.len()],
        }
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let (dx, dy) = (0..grid.len())
            .map(|k| {
                let (x, y) = grid.coords(k);
                f(x, y)
            })
            .unzip();
        Self { grid, dx, dy }
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.dx) && all_finite(&self.dy)
    }

    /// Image of node `idx` in unwrapped coordinates.
    #[inline]
    pub fn image(&self, idx: usize) -> (f64, f64) {
        let (x, y) = self.grid.coords(idx);
        (x + self.dx[idx], y + self.dy[idx])
    }

    /// Sup over nodes of `|D|` with each component reduced mod 1 to
    /// `(-1/2, 1/2]`; zero exactly when the map is the identity on `T^2`.
    pub fn reduced_sup(&self) -> f64 {
        self.dx.iter().zip(&self.dy).fold(0.0, |m, (a, b)| {
            m.max(reduce_half(*a).abs().max(reduce_half(*b).abs()))
        })
    }

    /// Sup distance between two maps on the torus (winding reduced).
    pub fn torus_distance(&self, other: &Displacement) -> f64 {
        self.dx
            .iter()
            .zip(&other.dx)
            .chain(self.dy.iter().zip(&other.dy))
            .fold(0.0, |m, (a, b)| m.max(reduce_half(a - b).abs()))
    }

    /// Sup distance between the unwrapped displacements.
    pub fn max_abs_diff(&self, other: &Displacement) -> f64 {
        self.dx
            .iter()
            .zip(&other.dx)
            .chain(self.dy.iter().zip(&other.dy))
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.dx
            .iter()
            .chain(&self.dy)
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Constant-coefficient (harmonic) 1-form `a dx + b dy`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HarmonicForm {
    pub a: f64,
    pub b: f64,
}

impl HarmonicForm {
    pub const ZERO: HarmonicForm = HarmonicForm { a: 0.0, b: 0.0 };

    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// `L^2` norm on the unit-area torus, `sqrt(a^2 + b^2)`.
    pub fn norm(&self) -> f64 {
        self.a.hypot(self.b)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::new(c * self.a, c * self.b)
    }

    pub fn to_field(&self, grid: TorusGrid) -> OneFormField {
        OneFormField::constant(grid, self.a, self.b)
    }
}

impl std::ops::Add for HarmonicForm {
    type Output = HarmonicForm;
    fn add(self, o: HarmonicForm) -> HarmonicForm {
        HarmonicForm::new(self.a + o.a, self.b + o.b)
    }
}

impl std::ops::Sub for HarmonicForm {
    type Output = HarmonicForm;
    fn sub(self, o: HarmonicForm) -> HarmonicForm {
        HarmonicForm::new(self.a - o.a, self.b - o.b)
    }
}
