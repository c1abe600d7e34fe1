//! Left concatenation of harmonic loops `theta_gamma *_l Phi`.

use crate::error::{Error, Result};
use crate::grid::{Displacement, HarmonicForm};
use crate::isotopy::{
    concatenate_generators, flux_cohomological, integrate_flow, plateau, plateau_rate, FlowField,
    GeneratorPath, DEFAULT_DELTA,
};

use super::{
    path_lengths, resample_target, AnalyticFlow, EnergyEstimate, EnergyKind, EstimatorConfig,
    Verification,
};

/// Nonzero lattice vectors of norm at most `sqrt 2`.
pub const ATTACHMENT_NEIGHBOURHOOD: [[i64; 2]; 8] = [
    [1, 0],
    [-1, 0],
    [0, 1],
    [0, -1],
    [1, 1],
    [1, -1],
    [-1, 1],
    [-1, -1],
];

const INTEGER_TOL: f64 = 1e-12;

fn loop_form(gamma: [f64; 2]) -> Result<HarmonicForm> {
    if gamma
        .iter()
        .any(|g| !g.is_finite() || (g - g.round()).abs() > INTEGER_TOL)
    {
        return Err(Error::NonIntegerAttachment);
    }
    Ok(HarmonicForm::new(gamma[0].round(), gamma[1].round()))
}

/// `theta_gamma *_l gen`: `gen` reparametrized onto `[0, 1/2]`, then the
/// constant harmonic loop of class `gamma` on `[1/2, 1]`, sampled at four
/// times the original rate. The trivial class returns `gen` itself.
pub fn attach_lattice_loop(gen: &GeneratorPath, gamma: [f64; 2]) -> Result<GeneratorPath> {
    let h = loop_form(gamma)?;
    if h == HarmonicForm::ZERO {
        return Ok(gen.clone());
    }
    let lp = GeneratorPath::harmonic(gen.grid(), gen.samples(), |_| h)?;
    concatenate_generators(&lp, gen, DEFAULT_DELTA, 4 * gen.samples())
}

/// Closed-form field of `theta_gamma *_l Phi` for a decoded `Phi`.
pub struct AttachedFlow<'a> {
    pub inner: AnalyticFlow<'a>,
    pub gamma: HarmonicForm,
    pub delta: f64,
}

impl FlowField for AttachedFlow<'_> {
    fn velocity(&self, t: f64, x: f64, y: f64) -> (f64, f64) {
        if t <= 0.5 {
            let rate = 2.0 * plateau_rate(2.0 * t, self.delta);
            if rate == 0.0 {
                return (0.0, 0.0);
            }
            let (vx, vy) = self.inner.velocity(plateau(2.0 * t, self.delta), x, y);
            (rate * vx, rate * vy)
        } else {
            let rate = 2.0 * plateau_rate(2.0 * t - 1.0, self.delta);
            (rate * self.gamma.b, -rate * self.gamma.a)
        }
    }
}

fn measure_attached(
    theta: &[f64],
    kind: EnergyKind,
    gamma: [i64; 2],
    target: &Displacement,
    cfg: &EstimatorConfig,
) -> Result<(GeneratorPath, Verification)> {
    if !matches!(kind, EnergyKind::HoferLike { .. }) {
        return Err(Error::InvalidArgument(
            "loop attachments need a Hofer-like estimate".into(),
        ));
    }
    let grid = cfg.grid()?;
    let param = cfg.parametrization(kind)?;
    let gen = param.decode(theta, grid, cfg.samples)?;
    let attached = attach_lattice_loop(&gen, [gamma[0] as f64, gamma[1] as f64])?;
    let value = path_lengths(&attached, kind)?.0;
    let flow = AttachedFlow {
        inner: AnalyticFlow::new(&param, theta, cfg.samples * cfg.substeps),
        gamma: HarmonicForm::new(gamma[0] as f64, gamma[1] as f64),
        delta: DEFAULT_DELTA,
    };
    let path = integrate_flow(&flow, grid, attached.samples(), cfg.substeps)?;
    let endpoint_error = path
        .endpoint()
        .torus_distance(&resample_target(target, grid));
    Ok((
        attached,
        Verification {
            value,
            endpoint_error,
        },
    ))
}

/// Estimate for the class `gamma`: the loop is attached to the path of
/// `base` and the concatenated path is measured and integrated once.
pub fn estimate_with_attachment(
    base: &EnergyEstimate,
    gamma: [i64; 2],
    target: &Displacement,
    cfg: &EstimatorConfig,
) -> Result<EnergyEstimate> {
    let (attached, v) = measure_attached(&base.theta, base.kind, gamma, target, cfg)?;
    let sup_value = path_lengths(&attached, base.kind)?.1;
    Ok(EnergyEstimate {
        value: v.value,
        sup_value,
        kind: base.kind,
        attachment: gamma,
        endpoint_error: v.endpoint_error,
        flux: flux_cohomological(&attached),
        theta: base.theta.clone(),
        trace: base.trace.clone(),
    })
}

pub(super) fn verify_attached(
    est: &EnergyEstimate,
    target: &Displacement,
    cfg: &EstimatorConfig,
) -> Result<Verification> {
    Ok(measure_attached(&est.theta, est.kind, est.attachment, target, cfg)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{hoferlike_length, LengthMode};
    use crate::grid::TorusGrid;
    use crate::isotopy::FluxClass;
    use std::f64::consts::PI;

    fn shear(grid: TorusGrid) -> GeneratorPath {
        GeneratorPath::from_potential(grid, 16, |_, _, y| 0.2 * (2.0 * PI * y).cos()).unwrap()
    }

    #[test]
    fn trivial_and_non_integer() {
        let gen = shear(TorusGrid::new(16).unwrap());
        assert_eq!(attach_lattice_loop(&gen, [0.0, 0.0]).unwrap(), gen);
        assert_eq!(
            attach_lattice_loop(&gen, [0.5, 0.0]),
            Err(Error::NonIntegerAttachment)
        );
    }

    #[test]
    fn loop_adds_its_norm() {
        let grid = TorusGrid::new(32).unwrap();
        let gen = shear(grid);
        let base = hoferlike_length(&gen, 2.0, LengthMode::Integrated)
            .unwrap()
            .value;
        let att = attach_lattice_loop(&gen, [1.0, 0.0]).unwrap();
        let l = hoferlike_length(&att, 2.0, LengthMode::Integrated)
            .unwrap()
            .value;
        assert!((l - base - 1.0).abs() < 1e-3, "{l} {base}");
        let f = flux_cohomological(&att);
        assert!(f.distance(&FluxClass::new(1.0, 0.0)) < 1e-3);
    }

    #[test]
    fn endpoint_unchanged() {
        let cfg = EstimatorConfig::default();
        let kind = EnergyKind::HoferLike { p: 2.0 };
        let theta = cfg
            .parametrization(kind)
            .unwrap()
            .encode_constant(
                &[super::super::ModeAmplitude {
                    kx: 0,
                    ky: 1,
                    cos: 0.2,
                    sin: 0.0,
                }],
                HarmonicForm::ZERO,
            )
            .unwrap();
        let target = super::super::decoded_endpoint(&theta, kind, &cfg).unwrap();
        for g in [[0, -1], [1, 1]] {
            let (_, v) = measure_attached(&theta, kind, g, &target, &cfg).unwrap();
            assert!(v.endpoint_error < 1e-6, "{}", v.endpoint_error);
        }
    }
}
