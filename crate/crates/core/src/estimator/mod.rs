//! Upper estimates of Hofer and Hofer-like energies by penalized simplex
//! search over a truncated space of generators.

mod attach;
mod displace;
mod flux0;
mod nm;
mod param;

pub use attach::{
    attach_lattice_loop, estimate_with_attachment, AttachedFlow, ATTACHMENT_NEIGHBOURHOOD,
};
pub use displace::{
    displacement_energy, Candidate, DisplacementReport, Region, DISPLACEMENT_CLEARANCE,
};
pub use flux0::{
    default_flux0_targets, flux0_check, norm_estimate, AttachmentRow, Flux0Row, Flux0Target,
    NormReport, PRow,
};
pub use nm::nelder_mead;
pub use param::{integrate_decoded, AnalyticFlow, ModeAmplitude, Parametrization};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{hofer_length, hoferlike_length, LengthMode};
use crate::grid::{Displacement, TorusGrid};
use crate::interp::{sample, Interpolation};
use crate::isotopy::{flux_cohomological, FluxClass, GeneratorPath};

/// Penalty weights tried in order while the search center misses the target.
pub const PENALTY_SCHEDULE: [f64; 4] = [10.0, 1e2, 1e3, 1e4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EnergyKind {
    Hofer,
    #[serde(rename = "hoferlike")]
    HoferLike {
        p: f64,
    },
}

impl EnergyKind {
    fn harmonic(&self) -> bool {
        matches!(self, EnergyKind::HoferLike { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    /// Grid of the search (the target is resampled onto it).
    pub n: usize,
    pub samples: usize,
    pub substeps: usize,
    pub m_cut: usize,
    pub coeffs: usize,
    /// Objective evaluations per estimate, restarts included.
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    pub endpoint_tol: f64,
    pub subspace: usize,
    /// Edge of the initial simplex in parameter units.
    pub step: f64,
    pub delta: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            n: 16,
            samples: 16,
            substeps: 4,
            m_cut: 3,
            coeffs: 6,
            budget: 150,
            restarts: 5,
            seed: 0,
            endpoint_tol: 1e-3,
            subspace: 8,
            step: 0.02,
            delta: 0.1,
        }
    }
}

impl EstimatorConfig {
    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.n)
    }

    pub fn parametrization(&self, kind: EnergyKind) -> Result<Parametrization> {
        Parametrization::new(self.m_cut, self.coeffs, kind.harmonic())
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if self.samples < crate::isotopy::MIN_GENERATOR_SAMPLES {
            return Err(Error::InvalidArgument(
                "estimator needs at least 16 time samples".into(),
            ));
        }
        if self.substeps == 0 || self.restarts == 0 || self.subspace == 0 {
            return Err(Error::InvalidArgument(
                "substeps, restarts and subspace must be positive".into(),
            ));
        }
        if !(self.endpoint_tol > 0.0 && self.step > 0.0) {
            return Err(Error::InvalidArgument(
                "endpoint tolerance and step must be positive".into(),
            ));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(Error::InvalidArgument("delta must lie in (0, 1/2)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartTrace {
    pub start_objective: f64,
    pub best_objective: f64,
    pub rounds: usize,
    pub final_mu: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub seed: u64,
    pub evaluations: usize,
    pub feasible_evaluations: usize,
    /// `(length, endpoint error)` of every seed.
    pub seeds: Vec<(f64, f64)>,
    pub restarts: Vec<RestartTrace>,
    pub accepted_immediately: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    /// Integrated length of the best feasible path, an upper bound.
    pub value: f64,
    /// Sup-in-time length of the same path, an upper bound for the
    /// `(inf, p)` energy.
    pub sup_value: f64,
    pub kind: EnergyKind,
    /// Integer class of the attached loop; `[0, 0]` for none.
    pub attachment: [i64; 2],
    pub endpoint_error: f64,
    pub flux: FluxClass,
    pub theta: Vec<f64>,
    pub trace: OptimizerTrace,
}

/// Recomputed value and endpoint error of an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub value: f64,
    pub endpoint_error: f64,
}

/// Target map on the search grid; other grids are resampled with cubic
/// interpolation of the displacement.
pub fn resample_target(target: &Displacement, grid: TorusGrid) -> Displacement {
    if target.grid == grid {
        return target.clone();
    }
    Displacement::from_fn(grid, |x, y| {
        (
            sample(target.grid, Interpolation::Cubic, &target.dx, x, y),
            sample(target.grid, Interpolation::Cubic, &target.dy, x, y),
        )
    })
}

pub(crate) fn path_lengths(gen: &GeneratorPath, kind: EnergyKind) -> Result<(f64, f64)> {
    match kind {
        EnergyKind::Hofer => Ok((
            hofer_length(gen, LengthMode::Integrated)?.value,
            hofer_length(gen, LengthMode::Sup)?.value,
        )),
        EnergyKind::HoferLike { p } => Ok((
            hoferlike_length(gen, p, LengthMode::Integrated)?.value,
            hoferlike_length(gen, p, LengthMode::Sup)?.value,
        )),
    }
}

struct Search<'a> {
    cfg: &'a EstimatorConfig,
    param: Parametrization,
    grid: TorusGrid,
    target: Displacement,
    kind: EnergyKind,
    evaluations: usize,
    feasible_evaluations: usize,
    best: Option<(Vec<f64>, f64)>,
    best_error: f64,
}

impl Search<'_> {
    /// `(length, endpoint error)`; failures of the flow count as infinite.
    fn measure(&self, theta: &[f64]) -> Result<(f64, f64)> {
        let path = integrate_decoded(
            &self.param,
            theta,
            self.grid,
            self.cfg.samples,
            self.cfg.substeps,
        )?;
        let err = path.endpoint().torus_distance(&self.target);
        let gen = self.param.decode(theta, self.grid, self.cfg.samples)?;
        Ok((path_lengths(&gen, self.kind)?.0, err))
    }

    fn evaluate(&mut self, theta: &[f64], mu: f64) -> (f64, f64) {
        self.evaluations += 1;
        let (len, err) = self
            .measure(theta)
            .unwrap_or((f64::INFINITY, f64::INFINITY));
        self.best_error = self.best_error.min(err);
        if err <= self.cfg.endpoint_tol && len.is_finite() {
            self.feasible_evaluations += 1;
            if self.best.as_ref().is_none_or(|b| len < b.1) {
                self.best = Some((theta.to_vec(), len));
            }
        }
        (len + mu * err * err, err)
    }

    fn done(&self) -> bool {
        self.best.as_ref().is_some_and(|b| b.1 <= 1e-12)
    }
}

fn subspace(rng: &mut ChaCha8Rng, dim: usize, k: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    while basis.len() < k {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

/// Minimizes `length + mu |endpoint - target|^2` from the given seeds
/// (parameters of `cfg.parametrization(kind)`; the zero path when empty)
/// and returns the shortest path meeting `cfg.endpoint_tol`.
pub fn estimate_energy(
    target: &Displacement,
    kind: EnergyKind,
    seeds: &[Vec<f64>],
    cfg: &EstimatorConfig,
) -> Result<EnergyEstimate> {
    cfg.validate()?;
    if let EnergyKind::HoferLike { p } = kind {
        crate::calculus::check_exponent(p)?;
    }
    let grid = cfg.grid()?;
    let param = cfg.parametrization(kind)?;
    let dim = param.dim();
    let zero = [vec![0.0; dim]];
    let seeds = if seeds.is_empty() { &zero[..] } else { seeds };
    for s in seeds {
        param.check(s)?;
    }
    let mut search = Search {
        cfg,
        param,
        grid,
        target: resample_target(target, grid),
        kind,
        evaluations: 0,
        feasible_evaluations: 0,
        best: None,
        best_error: f64::INFINITY,
    };
    let mut trace = OptimizerTrace {
        seed: cfg.seed,
        evaluations: 0,
        feasible_evaluations: 0,
        seeds: Vec::new(),
        restarts: Vec::new(),
        accepted_immediately: false,
    };
    let mut center = seeds[0].clone();
    let mut center_err = f64::INFINITY;
    for s in seeds {
        let (obj, err) = search.evaluate(s, 0.0);
        trace.seeds.push((obj, err));
        if err < center_err {
            center = s.clone();
            center_err = err;
        }
    }
    if let Some((b, _)) = &search.best {
        center = b.clone();
    }
    if search.done() {
        trace.accepted_immediately = true;
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let k = cfg.subspace.min(dim);
        let round_budget = 4 * (k + 1);
        for r in 0..cfg.restarts {
            let remaining = cfg.budget.saturating_sub(search.evaluations);
            if remaining == 0 {
                break;
            }
            let restart_budget = remaining / (cfg.restarts - r);
            let spent0 = search.evaluations;
            let mut x = match &search.best {
                Some((b, _)) => b.clone(),
                None => center.clone(),
            };
            if r > 0 {
                for v in x.iter_mut() {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *v += 0.25 * cfg.step * z;
                }
            }
            let mut level = 0;
            let (start_obj, _) = search.evaluate(&x, PENALTY_SCHEDULE[level]);
            let mut rt = RestartTrace {
                start_objective: start_obj,
                best_objective: start_obj,
                rounds: 0,
                final_mu: PENALTY_SCHEDULE[level],
                evaluations: 0,
            };
            while search.evaluations - spent0 < restart_budget && !search.done() {
                let budget = round_budget.min(restart_budget - (search.evaluations - spent0));
                if budget < 2 {
                    break;
                }
                let basis = subspace(&mut rng, dim, k);
                let mu = PENALTY_SCHEDULE[level];
                let base = x.clone();
                let point = |y: &[f64]| -> Vec<f64> {
                    let mut z = base.clone();
                    for (c, b) in y.iter().zip(&basis) {
                        z.iter_mut()
                            .zip(b)
                            .for_each(|(zi, bi)| *zi += cfg.step * c * bi);
                    }
                    z
                };
                // endpoint error of the lowest objective seen this round
                let mut lowest = (f64::INFINITY, f64::INFINITY);
                let (y, obj) = nelder_mead(
                    |y| {
                        let (o, e) = search.evaluate(&point(y), mu);
                        if o < lowest.0 {
                            lowest = (o, e);
                        }
                        o
                    },
                    &vec![0.0; k],
                    1.0,
                    budget,
                );
                x = point(&y);
                let err = lowest.1;
                rt.rounds += 1;
                rt.best_objective = rt.best_objective.min(obj);
                if err > cfg.endpoint_tol && level + 1 < PENALTY_SCHEDULE.len() {
                    level += 1;
                }
            }
            rt.final_mu = PENALTY_SCHEDULE[level];
            rt.evaluations = search.evaluations - spent0;
            trace.restarts.push(rt);
            if search.done() {
                break;
            }
        }
    }
    trace.evaluations = search.evaluations;
    trace.feasible_evaluations = search.feasible_evaluations;
    let Some((theta, _)) = search.best.clone() else {
        return Err(Error::EndpointNotMet {
            best_error: search.best_error,
            evaluations: search.evaluations,
        });
    };
    let gen = search.param.decode(&theta, grid, cfg.samples)?;
    let (value, sup_value) = path_lengths(&gen, kind)?;
    let (_, endpoint_error) = search.measure(&theta)?;
    Ok(EnergyEstimate {
        value,
        sup_value,
        kind,
        attachment: [0, 0],
        endpoint_error,
        flux: flux_cohomological(&gen),
        theta,
        trace,
    })
}

impl EnergyEstimate {
    /// Decoded generator of the estimate (without any attached loop).
    pub fn generator(&self, cfg: &EstimatorConfig) -> Result<GeneratorPath> {
        cfg.parametrization(self.kind)?
            .decode(&self.theta, cfg.grid()?, cfg.samples)
    }

    /// Recomputes length and endpoint error from the stored parameters.
    pub fn verify(&self, target: &Displacement, cfg: &EstimatorConfig) -> Result<Verification> {
        if self.attachment != [0, 0] {
            return attach::verify_attached(self, target, cfg);
        }
        let grid = cfg.grid()?;
        let param = cfg.parametrization(self.kind)?;
        let gen = param.decode(&self.theta, grid, cfg.samples)?;
        let path = integrate_decoded(&param, &self.theta, grid, cfg.samples, cfg.substeps)?;
        Ok(Verification {
            value: path_lengths(&gen, self.kind)?.0,
            endpoint_error: path
                .endpoint()
                .torus_distance(&resample_target(target, grid)),
        })
    }
}

/// Hamiltonian parameters extended by a zero harmonic channel.
pub fn with_harmonic_channel(theta: &[f64], coeffs: usize) -> Vec<f64> {
    let mut out = theta.to_vec();
    out.extend(std::iter::repeat_n(0.0, 2 * coeffs));
    out
}

/// Parameters of `-X_{1-t}`, whose flow ends at the inverse map.
pub fn reversed(theta: &[f64], coeffs: usize) -> Vec<f64> {
    theta
        .chunks(coeffs)
        .flat_map(|c| c.iter().rev().map(|v| -v).collect::<Vec<_>>())
        .collect()
}

/// Endpoint of the decoded generator on the search grid.
pub fn decoded_endpoint(
    theta: &[f64],
    kind: EnergyKind,
    cfg: &EstimatorConfig,
) -> Result<Displacement> {
    let param = cfg.parametrization(kind)?;
    let path = integrate_decoded(&param, theta, cfg.grid()?, cfg.samples, cfg.substeps)?;
    Ok(path.endpoint().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::HarmonicForm;

    fn quick() -> EstimatorConfig {
        EstimatorConfig {
            budget: 60,
            restarts: 2,
            ..EstimatorConfig::default()
        }
    }

    fn shear(cfg: &EstimatorConfig, a: f64, kind: EnergyKind) -> Vec<f64> {
        cfg.parametrization(kind)
            .unwrap()
            .encode_constant(
                &[ModeAmplitude {
                    kx: 0,
                    ky: 1,
                    cos: a,
                    sin: 0.0,
                }],
                HarmonicForm::ZERO,
            )
            .unwrap()
    }

    #[test]
    fn identity_accepted_immediately() {
        let cfg = quick();
        let grid = cfg.grid().unwrap();
        let est =
            estimate_energy(&Displacement::identity(grid), EnergyKind::Hofer, &[], &cfg).unwrap();
        assert!(est.value <= 1e-6 && est.trace.accepted_immediately && est.trace.evaluations == 1);
    }

    #[test]
    fn shear_hofer_estimate() {
        let cfg = quick();
        let seed = shear(&cfg, 0.3, EnergyKind::Hofer);
        let target = decoded_endpoint(&seed, EnergyKind::Hofer, &cfg).unwrap();
        let est = estimate_energy(&target, EnergyKind::Hofer, &[seed], &cfg).unwrap();
        assert!(est.value <= 0.6 + 5e-2 && est.endpoint_error <= 1e-3);
        assert!(est.trace.evaluations <= cfg.budget);
        let v = est.verify(&target, &cfg).unwrap();
        assert!((v.value - est.value).abs() <= 1e-10 && v.endpoint_error <= 1e-3);
        assert!(est.sup_value >= est.value - 1e-12);
    }

    #[test]
    fn harmonic_estimate() {
        let cfg = quick();
        let kind = EnergyKind::HoferLike { p: 2.0 };
        let seed = cfg
            .parametrization(kind)
            .unwrap()
            .encode_constant(&[], HarmonicForm::new(0.0, 0.4))
            .unwrap();
        let target = decoded_endpoint(&seed, kind, &cfg).unwrap();
        let est = estimate_energy(&target, kind, &[seed], &cfg).unwrap();
        assert!(est.value <= 0.4 + 5e-2);
        assert!(est.value >= est.flux.norm() - 1e-6);
    }

    #[test]
    fn unreachable_target_reported() {
        let cfg = EstimatorConfig {
            budget: 12,
            restarts: 1,
            ..quick()
        };
        let grid = cfg.grid().unwrap();
        let target = Displacement::from_fn(grid, |x, _| {
            (0.2 * (2.0 * std::f64::consts::PI * x).sin(), 0.0)
        });
        match estimate_energy(&target, EnergyKind::Hofer, &[], &cfg) {
            Err(Error::EndpointNotMet {
                evaluations,
                best_error,
            }) => {
                assert!(evaluations <= 12 && best_error > 1e-3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn deterministic_trace() {
        let cfg = quick();
        let seed = shear(&cfg, 0.2, EnergyKind::Hofer);
        let target = decoded_endpoint(&seed, EnergyKind::Hofer, &cfg).unwrap();
        let a = estimate_energy(
            &target,
            EnergyKind::Hofer,
            std::slice::from_ref(&seed),
            &cfg,
        )
        .unwrap();
        let b = estimate_energy(&target, EnergyKind::Hofer, &[seed], &cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn reversal_of_parameters() {
        // composition error is dominated by interpolation, so use a fine grid
        let cfg = EstimatorConfig { n: 128, ..quick() };
        let kind = EnergyKind::HoferLike { p: 2.0 };
        let param = cfg.parametrization(kind).unwrap();
        let theta: Vec<f64> = (0..param.dim())
            .map(|i| 5e-4 * ((i * 31) % 7) as f64)
            .collect();
        let fwd = decoded_endpoint(&theta, kind, &cfg).unwrap();
        let back = decoded_endpoint(&reversed(&theta, cfg.coeffs), kind, &cfg).unwrap();
        let composed = crate::isotopy::compose_maps(&back, &fwd).unwrap();
        assert!(composed.reduced_sup() < 1e-4, "{}", composed.reduced_sup());
    }
}
