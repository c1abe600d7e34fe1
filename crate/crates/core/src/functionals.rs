//! Length functionals on generator paths: Hofer, Hofer-like `(1,p)` and
//! `(inf,p)`, the vector-field norm, Calabi and the `omega -> c omega` rescaling.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::calculus::{check_exponent, contract_with_omega, oscillation};
use crate::error::{Error, Result};
use crate::grid::{HarmonicForm, ScalarField, VectorFieldField};
use crate::hodge::hodge_decompose;
use crate::isotopy::GeneratorPath;

/// Largest harmonic coefficient a generator may carry and still count as
/// Hamiltonian.
pub const HAMILTONIAN_TOL: f64 = 1e-8;

/// Time integral or time supremum of the integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthMode {
    Integrated,
    Sup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionalKind {
    Hofer,
    HoferLike,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthReport {
    pub path_id: String,
    pub kind: FunctionalKind,
    pub mode: LengthMode,
    /// Exponent of the harmonic norm; `inf` for Hofer lengths.
    pub p: f64,
    pub n: usize,
    pub samples: usize,
    pub value: f64,
}

fn fmt_p(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

impl LengthReport {
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.path_id = id.into();
        self
    }

    /// Tag such as `hl(1,2)` or `h(inf,inf)`.
    pub fn functional(&self) -> String {
        let name = match self.kind {
            FunctionalKind::Hofer => "h",
            FunctionalKind::HoferLike => "hl",
        };
        let first = match self.mode {
            LengthMode::Integrated => "1",
            LengthMode::Sup => "inf",
        };
        format!("{name}({first},{})", fmt_p(self.p))
    }

    pub const CSV_HEADER: &'static str = "path_id,functional,p,N,T,value";

    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.path_id.clone(),
            self.functional(),
            fmt_p(self.p),
            self.n.to_string(),
            self.samples.to_string(),
            self.value.to_string(),
        ]
    }

    /// One CSV line; fields holding commas or quotes are quoted.
    pub fn csv_row(&self) -> String {
        self.csv_fields()
            .iter()
            .map(|f| csv_quote(f))
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub fn csv_quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

impl fmt::Display for LengthReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.functional(), self.value)
    }
}

/// `L^p` norm of a harmonic form on the unit-area flat torus. The
/// pointwise norm is constant, so every exponent gives `sqrt(a^2 + b^2)`.
pub fn harmonic_norm(h: HarmonicForm, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(h.norm())
}

fn combine(values: &[f64], mode: LengthMode) -> f64 {
    match mode {
        LengthMode::Sup => values.iter().fold(0.0, |m, v| m.max(*v)),
        LengthMode::Integrated => crate::fd::integrate(values),
    }
}

fn oscillations(gen: &GeneratorPath) -> Result<Vec<f64>> {
    gen.u().iter().map(oscillation).collect()
}

fn report(
    gen: &GeneratorPath,
    kind: FunctionalKind,
    mode: LengthMode,
    p: f64,
    value: f64,
) -> LengthReport {
    LengthReport {
        path_id: String::new(),
        kind,
        mode,
        p,
        n: gen.grid().n(),
        samples: gen.samples(),
        value,
    }
}

fn require_hamiltonian(gen: &GeneratorPath) -> Result<()> {
    let h = gen.harmonic_sup();
    if h > HAMILTONIAN_TOL {
        return Err(Error::NotHamiltonian(h));
    }
    Ok(())
}

/// `int_0^1 osc(U_t) dt` or `sup_t osc(U_t)` of a Hamiltonian generator.
pub fn hofer_length(gen: &GeneratorPath, mode: LengthMode) -> Result<LengthReport> {
    require_hamiltonian(gen)?;
    let osc = oscillations(gen)?;
    Ok(report(
        gen,
        FunctionalKind::Hofer,
        mode,
        f64::INFINITY,
        combine(&osc, mode),
    ))
}

/// Integrand `osc(U_t) + |H_t|_p`, integrated or sup'd in time.
pub fn hoferlike_length(gen: &GeneratorPath, p: f64, mode: LengthMode) -> Result<LengthReport> {
    check_exponent(p)?;
    let osc = oscillations(gen)?;
    let vals = osc
        .iter()
        .zip(gen.h())
        .map(|(o, h)| Ok(o + harmonic_norm(*h, p)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(report(
        gen,
        FunctionalKind::HoferLike,
        mode,
        p,
        combine(&vals, mode),
    ))
}

/// Per-sample integrand `osc(U_t) + |H_t|_{L^2}`.
pub fn hoferlike_integrand(gen: &GeneratorPath) -> Result<Vec<f64>> {
    let osc = oscillations(gen)?;
    Ok(osc.iter().zip(gen.h()).map(|(o, h)| o + h.norm()).collect())
}

/// `osc(U_Y) + |H_Y|_{L^2}` for a symplectic vector field.
pub fn vf_hoferlike_norm(y: &VectorFieldField, tol: f64) -> Result<f64> {
    let d = hodge_decompose(&contract_with_omega(y), tol)?;
    Ok(oscillation(&d.u)? + d.h.norm())
}

/// `int_0^1 int_M (U_t + offset_t) dA dt` of a Hamiltonian generator.
pub fn calabi(gen: &GeneratorPath, offset: Option<&[ScalarField]>) -> Result<f64> {
    require_hamiltonian(gen)?;
    if let Some(off) = offset {
        if off.len() != gen.samples() + 1 {
            return Err(Error::Mismatch(
                "offset sampling differs from the generator".into(),
            ));
        }
    }
    let means: Vec<f64> = (0..=gen.samples())
        .map(|k| gen.u()[k].mean() + offset.map_or(0.0, |o| o[k].mean()))
        .collect();
    Ok(combine(&means, LengthMode::Integrated))
}

/// Hofer-like `(1,2)` length before and after `omega -> c omega` in real
/// dimension `2n`, with the bracketing factors `min/max {c, c^{(n+1)/2}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub original: f64,
    pub rescaled: f64,
    pub predicted_low: f64,
    pub predicted_high: f64,
    /// `c * original`, the exact value when `n = 1`.
    pub exact_dim2: Option<f64>,
}

pub fn scaling_law(gen: &GeneratorPath, c: f64, n: u32) -> Result<ScalingReport> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "scale factor must be positive, got {c}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("half-dimension must be >= 1".into()));
    }
    let osc = oscillations(gen)?;
    let harm = c.powf((n as f64 + 1.0) / 2.0);
    let orig: Vec<f64> = osc.iter().zip(gen.h()).map(|(o, h)| o + h.norm()).collect();
    let scaled: Vec<f64> = osc
        .iter()
        .zip(gen.h())
        .map(|(o, h)| c * o + harm * h.norm())
        .collect();
    let original = combine(&orig, LengthMode::Integrated);
    let rescaled = combine(&scaled, LengthMode::Integrated);
    Ok(ScalingReport {
        original,
        rescaled,
        predicted_low: c.min(harm) * original,
        predicted_high: c.max(harm) * original,
        exact_dim2: (n == 1).then_some(c * original),
    })
}
