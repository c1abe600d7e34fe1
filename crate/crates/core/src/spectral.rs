//! Fourier pseudospectral operators on the periodic grid.
//!
//! Odd derivatives drop the Nyquist mode (its derivative is not
//! representable as a real field), so `N` must be even.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::par;

type C64 = Complex<f64>;

struct Plan {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

fn plan(n: usize) -> Arc<Plan> {
    static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Plan>>>> = OnceLock::new();
    let plans = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = plans.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plan {
                fwd: planner.plan_fft_forward(n),
                inv: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Signed wavenumber of FFT index `m`, with the Nyquist index mapped to 0.
#[inline]
pub fn derivative_wavenumber(m: usize, n: usize) -> f64 {
    if 2 * m < n {
        m as f64
    } else if 2 * m == n {
        0.0
    } else {
        m as f64 - n as f64
    }
}

fn transform(data: &mut [C64], n: usize, fft: &Arc<dyn Fft<f64>>) {
    // rows (x direction)
    {
        let mut rows: Vec<&mut [C64]> = data.chunks_mut(n).collect();
        par::for_each_mut(&mut rows, |_, row| fft.process(row));
    }
    // columns (y direction), via gather/scatter
    let columns = par::map_range(n, |i| {
        let mut col: Vec<C64> = (0..n).map(|j| data[j * n + i]).collect();
        fft.process(&mut col);
        col
    });
    for (i, col) in columns.into_iter().enumerate() {
        for (j, v) in col.into_iter().enumerate() {
            data[j * n + i] = v;
        }
    }
}

/// Forward 2-D DFT of a real field (unnormalized).
pub fn fft2(values: &[f64], n: usize) -> Vec<C64> {
    let mut data: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
    transform(&mut data, n, &plan(n).fwd);
    data
}

/// Inverse 2-D DFT returning the real part, normalized by `1/N^2`.
pub fn ifft2_real(mut spec: Vec<C64>, n: usize) -> Vec<f64> {
    transform(&mut spec, n, &plan(n).inv);
    let scale = 1.0 / (n * n) as f64;
    spec.into_iter().map(|c| c.re * scale).collect()
}

/// Spectral partial derivatives `(d/dx f, d/dy f)`.
pub fn gradient(values: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let spec = fft2(values, n);
    let mut sx = spec.clone();
    let mut sy = spec;
    for j in 0..n {
        let ky = 2.0 * PI * derivative_wavenumber(j, n);
        for i in 0..n {
            let kx = 2.0 * PI * derivative_wavenumber(i, n);
            let idx = j * n + i;
            sx[idx] *= C64::new(0.0, kx);
            sy[idx] *= C64::new(0.0, ky);
        }
    }
    (ifft2_real(sx, n), ifft2_real(sy, n))
}

/// `d/dx b - d/dy a`, the single component of `d(a dx + b dy)`.
pub fn curl(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let sa = fft2(a, n);
    let sb = fft2(b, n);
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let ky = 2.0 * PI * derivative_wavenumber(j, n);
        for i in 0..n {
            let kx = 2.0 * PI * derivative_wavenumber(i, n);
            let idx = j * n + i;
            out[idx] = C64::new(0.0, kx) * sb[idx] - C64::new(0.0, ky) * sa[idx];
        }
    }
    ifft2_real(out, n)
}

/// Mean-zero potential `U` minimizing `|dU - (a dx + b dy)|` in `L^2`;
/// for an exact input this solves `dU = a dx + b dy` exactly.
pub fn potential(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let sa = fft2(a, n);
    let sb = fft2(b, n);
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let ky = 2.0 * PI * derivative_wavenumber(j, n);
        for i in 0..n {
            let kx = 2.0 * PI * derivative_wavenumber(i, n);
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                continue;
            }
            let idx = j * n + i;
            // conj(i k) . (a_hat, b_hat) / |k|^2
            out[idx] = (C64::new(0.0, -kx) * sa[idx] + C64::new(0.0, -ky) * sb[idx]) / k2;
        }
    }
    ifft2_real(out, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(n: usize, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..n * n)
            .map(|k| f((k % n) as f64 / n as f64, (k / n) as f64 / n as f64))
            .collect()
    }

    #[test]
    fn fft_round_trip() {
        let n = 16;
        let v = field(n, |x, y| {
            (2.0 * PI * x).sin() + 0.3 * (4.0 * PI * y).cos() + 1.5
        });
        let back = ifft2_real(fft2(&v, n), n);
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn gradient_of_mixed_mode() {
        let n = 32;
        let v = field(n, |x, y| (2.0 * PI * (x + 2.0 * y)).sin());
        let (gx, gy) = gradient(&v, n);
        let ex = field(n, |x, y| 2.0 * PI * (2.0 * PI * (x + 2.0 * y)).cos());
        let ey = field(n, |x, y| 4.0 * PI * (2.0 * PI * (x + 2.0 * y)).cos());
        for k in 0..n * n {
            assert!((gx[k] - ex[k]).abs() < 1e-11);
            assert!((gy[k] - ey[k]).abs() < 1e-11);
        }
    }

    #[test]
    fn potential_inverts_gradient() {
        let n = 32;
        let u = field(n, |x, y| {
            (2.0 * PI * x).cos() * (2.0 * PI * y).sin() + 0.2 * (6.0 * PI * y).cos()
        });
        let (a, b) = gradient(&u, n);
        let back = potential(&a, &b, n);
        for k in 0..n * n {
            assert!((u[k] - back[k]).abs() < 1e-12);
        }
    }
}
