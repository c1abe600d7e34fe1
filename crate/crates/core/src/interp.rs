//! Off-grid evaluation: periodic interpolation in space, 4-point Lagrange
//! interpolation on uniform time samples.

use serde::{Deserialize, Serialize};

use crate::grid::{wrap_unit, TorusGrid};

/// Spatial interpolation scheme for periodic grid data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    /// Tensor-product linear, `O(h^2)`.
    Bilinear,
    /// Tensor-product 4-point Lagrange, `O(h^4)`.
    #[default]
    Cubic,
}

/// Precomputed node indices and weights for one evaluation point.
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    idx: [usize; 16],
    w: [f64; 16],
    len: usize,
}

#[inline]
fn cubic_weights(u: f64) -> [f64; 4] {
    let um1 = u - 1.0;
    let um2 = u - 2.0;
    let up1 = u + 1.0;
    [
        -u * um1 * um2 / 6.0,
        up1 * um1 * um2 / 2.0,
        -up1 * u * um2 / 2.0,
        up1 * u * um1 / 6.0,
    ]
}

impl Stencil {
    #[inline]
    pub fn new(grid: TorusGrid, scheme: Interpolation, x: f64, y: f64) -> Self {
        let n = grid.n();
        let nf = n as f64;
        let ux = wrap_unit(x) * nf;
        let uy = wrap_unit(y) * nf;
        let ix = (ux.floor() as usize).min(n - 1);
        let iy = (uy.floor() as usize).min(n - 1);
        let fx = ux - ix as f64;
        let fy = uy - iy as f64;
        let mut s = Stencil {
            idx: [0; 16],
            w: [0.0; 16],
            len: 0,
        };
        match scheme {
            Interpolation::Bilinear => {
                let wx = [1.0 - fx, fx];
                let wy = [1.0 - fy, fy];
                for (b, wyb) in wy.iter().enumerate() {
                    let j = (iy + b) % n;
                    for (a, wxa) in wx.iter().enumerate() {
                        let i = (ix + a) % n;
                        s.idx[s.len] = j * n + i;
                        s.w[s.len] = wxa * wyb;
                        s.len += 1;
                    }
                }
            }
            Interpolation::Cubic => {
                let wx = cubic_weights(fx);
                let wy = cubic_weights(fy);
                let wrap = |k: usize| if k >= n { k - n } else { k };
                let cols = [wrap(ix + n - 1), ix, wrap(ix + 1), wrap(ix + 2)];
                let rows = [wrap(iy + n - 1), iy, wrap(iy + 1), wrap(iy + 2)];
                for (r, wyb) in rows.iter().zip(&wy) {
                    let row = r * n;
                    for (i, wxa) in cols.iter().zip(&wx) {
                        s.idx[s.len] = row + i;
                        s.w[s.len] = wxa * wyb;
                        s.len += 1;
                    }
                }
            }
        }
        s
    }

    #[inline]
    pub fn apply(&self, values: &[f64]) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.len {
            acc += self.w[k] * values[self.idx[k]];
        }
        acc
    }

    /// `(node index, weight)` pairs of the stencil.
    #[inline]
    pub fn points(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.idx[..self.len]
            .iter()
            .copied()
            .zip(self.w[..self.len].iter().copied())
    }

    #[inline]
    pub fn apply2(&self, a: &[f64], b: &[f64]) -> (f64, f64) {
        let mut s = 0.0;
        let mut t = 0.0;
        for k in 0..self.len {
            let i = self.idx[k];
            s += self.w[k] * a[i];
            t += self.w[k] * b[i];
        }
        (s, t)
    }
}

/// Evaluate periodic grid data at an arbitrary point.
pub fn sample(grid: TorusGrid, scheme: Interpolation, values: &[f64], x: f64, y: f64) -> f64 {
    Stencil::new(grid, scheme, x, y).apply(values)
}

/// 4-point Lagrange weights for evaluating uniformly sampled data
/// (`samples + 1` values on `[0, 1]`) at time `t`. Returns the first sample
/// index of the window and its weights. Near the ends the window shifts
/// inward rather than extrapolating.
pub fn time_weights(t: f64, samples: usize) -> (usize, [f64; 4]) {
    debug_assert!(samples >= 3);
    let tau = t.clamp(0.0, 1.0) * samples as f64;
    let k = (tau.floor() as usize).min(samples - 1);
    let start = k.saturating_sub(1).min(samples - 3);
    let mut w = [0.0; 4];
    for (m, wm) in w.iter_mut().enumerate() {
        let xm = (start + m) as f64;
        let mut prod = 1.0;
        for l in 0..4 {
            if l != m {
                let xl = (start + l) as f64;
                prod *= (tau - xl) / (xm - xl);
            }
        }
        *wm = prod;
    }
    (start, w)
}

/// Lagrange weights on a uniform grid of `samples + 1` nodes, combined
/// node-wise over equally-sized field arrays.
pub fn blend(fields: &[&[f64]; 4], w: &[f64; 4]) -> Vec<f64> {
    let len = fields[0].len();
    (0..len)
        .map(|i| {
            w[0] * fields[0][i] + w[1] * fields[1][i] + w[2] * fields[2][i] + w[3] * fields[3][i]
        })
        .collect()
}
