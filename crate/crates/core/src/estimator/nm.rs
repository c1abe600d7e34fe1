//! Budgeted Nelder-Mead simplex search.

/// Minimizes `f` from `x0` with an axis-aligned initial simplex of edge
/// `step`, spending at most `budget` evaluations. Non-finite values count
/// as `+inf`. Returns the best vertex and its value.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    budget: usize,
) -> (Vec<f64>, f64) {
    let d = x0.len();
    let mut used = 0usize;
    let mut eval = |x: &[f64], used: &mut usize| {
        *used += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let v0 = eval(x0, &mut used);
    simplex.push((x0.to_vec(), v0));
    for i in 0..d {
        if used >= budget {
            break;
        }
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut used);
        simplex.push((x, v));
    }
    if simplex.len() < d + 1 {
        return best(simplex);
    }
    while used < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[d].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if size < 1e-10 || (spread.is_finite() && spread <= 1e-14 * simplex[0].1.abs().max(1e-300))
        {
            break;
        }
        let mut centroid = vec![0.0; d];
        for (x, _) in &simplex[..d] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / d as f64;
            }
        }
        let worst = simplex[d].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(1.0);
        let fr = eval(&xr, &mut used);
        if fr < simplex[0].1 {
            if used >= budget {
                simplex[d] = (xr, fr);
                break;
            }
            let xe = along(2.0);
            let fe = eval(&xe, &mut used);
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
            continue;
        }
        if used >= budget {
            break;
        }
        let (xc, fc) = if fr < worst.1 {
            let x = along(0.5);
            let v = eval(&x, &mut used);
            (x, v)
        } else {
            let x = along(-0.5);
            let v = eval(&x, &mut used);
            (x, v)
        };
        if fc < fr.min(worst.1) {
            simplex[d] = (xc, fc);
            continue;
        }
        // shrink toward the best vertex
        let x_best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            if used >= budget {
                break;
            }
            let x: Vec<f64> = vertex
                .0
                .iter()
                .zip(&x_best)
                .map(|(v, b)| b + 0.5 * (v - b))
                .collect();
            let v = eval(&x, &mut used);
            *vertex = (x, v);
        }
    }
    best(simplex)
}

fn best(simplex: Vec<(Vec<f64>, f64)>) -> (Vec<f64>, f64) {
    simplex
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("simplex has a vertex")
}
