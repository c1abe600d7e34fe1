//! Fourth-order finite differences and quadrature on uniform time samples.

/// Stencil weights (times `1/(12 dt)`) and the first sample they apply to,
/// for the derivative at sample `k` of `samples + 1` uniform samples.
/// Interior points use the centered 5-point formula; the two samples at
/// each end use the one-sided fourth-order formulas.
pub fn stencil(k: usize, samples: usize) -> (usize, [f64; 5]) {
    assert!(
        samples >= 4,
        "fourth-order differences need at least 5 samples"
    );
    match k {
        0 => (0, [-25.0, 48.0, -36.0, 16.0, -3.0]),
        1 => (0, [-3.0, -10.0, 18.0, -6.0, 1.0]),
        _ if k + 1 == samples => (samples - 4, [-1.0, 6.0, -18.0, 10.0, 3.0]),
        _ if k == samples => (samples - 4, [3.0, -16.0, 36.0, -48.0, 25.0]),
        _ => (k - 2, [1.0, -8.0, 0.0, 8.0, -1.0]),
    }
}

/// Time derivative at sample `k` of node-wise data `series[m][node]`.
pub fn derivative<S: AsRef<[f64]>>(series: &[S], k: usize, dt: f64) -> Vec<f64> {
    let samples = series.len() - 1;
    let (start, w) = stencil(k, samples);
    let scale = 1.0 / (12.0 * dt);
    let len = series[0].as_ref().len();
    (0..len)
        .map(|i| {
            let mut acc = 0.0;
            for (m, wm) in w.iter().enumerate() {
                if *wm != 0.0 {
                    acc += wm * series[start + m].as_ref()[i];
                }
            }
            acc * scale
        })
        .collect()
}

/// Derivative of a scalar time series at sample `k`.
pub fn derivative_scalar(series: &[f64], k: usize, dt: f64) -> f64 {
    let samples = series.len() - 1;
    let (start, w) = stencil(k, samples);
    w.iter()
        .enumerate()
        .map(|(m, wm)| wm * series[start + m])
        .sum::<f64>()
        / (12.0 * dt)
}

/// Weight of sample `k` in `int_0^1 f dt` over `samples` intervals: the
/// trapezoid rule with Gregory end corrections `3/8, 7/6, 23/24`, exact on
/// cubics. Falls back to the plain trapezoid below six intervals.
pub fn quadrature_weight(k: usize, samples: usize) -> f64 {
    let dt = 1.0 / samples as f64;
    let edge = k.min(samples - k);
    if samples < 6 {
        return if edge == 0 { 0.5 * dt } else { dt };
    }
    match edge {
        0 => 3.0 / 8.0 * dt,
        1 => 7.0 / 6.0 * dt,
        2 => 23.0 / 24.0 * dt,
        _ => dt,
    }
}

/// `int_0^1 f dt` from `samples + 1` uniform values.
pub fn integrate(values: &[f64]) -> f64 {
    let samples = values.len() - 1;
    values
        .iter()
        .enumerate()
        .map(|(k, v)| quadrature_weight(k, samples) * v)
        .sum()
}
