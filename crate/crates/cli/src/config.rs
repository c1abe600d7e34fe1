//! Run configuration: a TOML file, dotted `--set` overrides, range checks.

use std::path::Path;

use hoferlike::estimator::EstimatorConfig;
use hoferlike::TorusGrid;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    /// Time intervals `T`.
    pub samples: usize,
    /// `s` intervals of two-parameter families.
    pub s: usize,
    pub substeps: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n: 128,
            samples: 64,
            s: 32,
            substeps: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Closedness gate per grid node count; the gate is `closed * N`.
    pub closed: f64,
    pub endpoint: f64,
    #[serde(rename = "loop")]
    pub loop_: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            closed: 1e-6,
            endpoint: 1e-3,
            loop_: 1e-6,
        }
    }
}

/// Search settings; the endpoint tolerance and seed come from the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorSection {
    pub n: usize,
    pub samples: usize,
    pub substeps: usize,
    pub m_cut: usize,
    pub coeffs: usize,
    pub budget: usize,
    pub restarts: usize,
    pub subspace: usize,
    pub step: f64,
    pub delta: f64,
}

impl Default for EstimatorSection {
    fn default() -> Self {
        let d = EstimatorConfig::default();
        Self {
            n: d.n,
            samples: d.samples,
            substeps: d.substeps,
            m_cut: d.m_cut,
            coeffs: d.coeffs,
            budget: d.budget,
            restarts: d.restarts,
            subspace: d.subspace,
            step: d.step,
            delta: d.delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HodgeSuite {
    pub forms: usize,
    pub angles: usize,
}

impl Default for HodgeSuite {
    fn default() -> Self {
        Self {
            forms: 100,
            angles: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluxSuite {
    /// Corpus size, split evenly between Hamiltonian, harmonic and mixed.
    pub paths: usize,
    pub pairs: usize,
}

impl Default for FluxSuite {
    fn default() -> Self {
        Self {
            paths: 30,
            pairs: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LengthsSuite {
    pub generators: usize,
    pub calabi: usize,
    pub pairs: usize,
    pub exponents: Vec<f64>,
}

impl Default for LengthsSuite {
    fn default() -> Self {
        Self {
            generators: 50,
            calabi: 100,
            pairs: 5,
            exponents: vec![1.0, 1.5, 2.0, 4.0, f64::INFINITY],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LoopSuite {
    pub range: i64,
}

impl Default for LoopSuite {
    fn default() -> Self {
        Self { range: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingSuite {
    pub factors: Vec<f64>,
    pub dims: Vec<u32>,
    pub generators: usize,
}

impl Default for ScalingSuite {
    fn default() -> Self {
        Self {
            factors: vec![0.5, 2.0, 5.0],
            dims: vec![1, 2, 3],
            generators: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FragmentSuite {
    pub pieces: usize,
    pub epsilon: f64,
}

impl Default for FragmentSuite {
    fn default() -> Self {
        Self {
            pieces: 50,
            epsilon: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoParamSuite {
    pub n: usize,
    pub families: usize,
}

impl Default for TwoParamSuite {
    fn default() -> Self {
        Self {
            n: 64,
            families: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Flux0Suite {
    pub exponents: Vec<f64>,
    pub tol_opt: f64,
}

impl Default for Flux0Suite {
    fn default() -> Self {
        Self {
            exponents: vec![2.0],
            tol_opt: 5e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DisplaceSuite {
    pub strips: Vec<f64>,
    pub disks: Vec<f64>,
}

impl Default for DisplaceSuite {
    fn default() -> Self {
        Self {
            strips: vec![0.2],
            disks: vec![0.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DualitySuite {
    pub fluxes: Vec<[f64; 2]>,
}

impl Default for DualitySuite {
    fn default() -> Self {
        Self {
            fluxes: vec![
                [0.0, 0.4],
                [0.3, -0.2],
                [0.25, 0.25],
                [-0.7, 0.1],
                [1.0, 0.0],
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IteratesSuite {
    pub k_max: usize,
    pub fluxes: Vec<[f64; 2]>,
}

impl Default for IteratesSuite {
    fn default() -> Self {
        Self {
            k_max: 20,
            fluxes: vec![
                [std::f64::consts::SQRT_2 / 10.0, 0.0],
                [0.5, 0.0],
                [0.5, 0.5],
                [1.0 / 3.0, 0.25],
                [0.1, 0.1 * std::f64::consts::SQRT_2],
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub out: String,
    pub grid: GridConfig,
    pub tolerances: Tolerances,
    pub estimator: EstimatorSection,
    pub hodge: HodgeSuite,
    pub flux: FluxSuite,
    pub lengths: LengthsSuite,
    #[serde(rename = "loop")]
    pub loop_: LoopSuite,
    pub scaling: ScalingSuite,
    pub fragment: FragmentSuite,
    pub twoparam: TwoParamSuite,
    pub flux0: Flux0Suite,
    pub displace: DisplaceSuite,
    pub duality: DualitySuite,
    pub iterates: IteratesSuite,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out: "out".into(),
            grid: GridConfig::default(),
            tolerances: Tolerances::default(),
            estimator: EstimatorSection::default(),
            hodge: HodgeSuite::default(),
            flux: FluxSuite::default(),
            lengths: LengthsSuite::default(),
            loop_: LoopSuite::default(),
            scaling: ScalingSuite::default(),
            fragment: FragmentSuite::default(),
            twoparam: TwoParamSuite::default(),
            flux0: Flux0Suite::default(),
            displace: DisplaceSuite::default(),
            duality: DualitySuite::default(),
            iterates: IteratesSuite::default(),
        }
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}

fn check_grid_n(key: &str, n: usize) -> Result<(), CliError> {
    check((8..=512).contains(&n) && n.is_multiple_of(2), || {
        format!("{key} = {n}: need an even value in [8, 512]")
    })
}

fn check_samples(key: &str, t: usize) -> Result<(), CliError> {
    check((16..=512).contains(&t), || {
        format!("{key} = {t}: need a value in [16, 512]")
    })
}

impl RunConfig {
    /// Parse `text`, apply `overrides` (`key=value`, dotted keys, TOML
    /// literal values with a bare-string fallback) and validate.
    pub fn load(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut root: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        for spec in overrides {
            apply_override(&mut root, spec)?;
        }
        let cfg: RunConfig = toml::Value::Table(root)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path, overrides: &[String]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::load(&text, overrides)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        check_grid_n("grid.n", self.grid.n)?;
        check_samples("grid.samples", self.grid.samples)?;
        check_grid_n("estimator.n", self.estimator.n)?;
        check_samples("estimator.samples", self.estimator.samples)?;
        check_grid_n("twoparam.n", self.twoparam.n)?;
        check(self.grid.s >= 4 && self.grid.s <= 512, || {
            format!("grid.s = {}: need a value in [4, 512]", self.grid.s)
        })?;
        check(self.grid.substeps >= 1, || {
            "grid.substeps must be >= 1".into()
        })?;
        let tol = &self.tolerances;
        for (k, v) in [
            ("closed", tol.closed),
            ("endpoint", tol.endpoint),
            ("loop", tol.loop_),
        ] {
            check(v > 0.0 && v.is_finite(), || {
                format!("tolerances.{k} must be positive")
            })?;
        }
        self.estimator_config()
            .validate()
            .map_err(|e| CliError::Config(format!("estimator: {e}")))?;
        check(self.hodge.angles >= 8, || {
            "hodge.angles must be >= 8".into()
        })?;
        check(self.flux.paths >= 3, || "flux.paths must be >= 3".into())?;
        check(self.fragment.pieces >= 2, || {
            "fragment.pieces must be >= 2".into()
        })?;
        check(self.fragment.epsilon > 0.0, || {
            "fragment.epsilon must be positive".into()
        })?;
        check(self.iterates.k_max >= 1, || {
            "iterates.k_max must be >= 1".into()
        })?;
        check(self.lengths.exponents.iter().all(|p| *p >= 1.0), || {
            "lengths.exponents must be >= 1".into()
        })?;
        check(self.flux0.exponents.iter().all(|p| *p >= 1.0), || {
            "flux0.exponents must be >= 1".into()
        })?;
        check(self.scaling.factors.iter().all(|c| *c > 0.0), || {
            "scaling.factors must be positive".into()
        })?;
        check(self.scaling.dims.iter().all(|n| *n >= 1), || {
            "scaling.dims must be >= 1".into()
        })?;
        Ok(())
    }

    pub fn grid(&self) -> TorusGrid {
        TorusGrid::new(self.grid.n).expect("validated grid")
    }

    pub fn closed_tol(&self) -> f64 {
        self.tolerances.closed * self.grid.n as f64
    }

    pub fn estimator_config(&self) -> EstimatorConfig {
        let e = &self.estimator;
        EstimatorConfig {
            n: e.n,
            samples: e.samples,
            substeps: e.substeps,
            m_cut: e.m_cut,
            coeffs: e.coeffs,
            budget: e.budget,
            restarts: e.restarts,
            seed: self.seed,
            endpoint_tol: self.tolerances.endpoint,
            subspace: e.subspace,
            step: e.step,
            delta: e.delta,
        }
    }

    /// SHA-256 of the canonical JSON form, with the output directory left
    /// out so that reruns into different directories hash alike.
    pub fn digest(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("out");
        }
        let bytes = serde_json::to_vec(&v).expect("config serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn apply_override(root: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--set expects key=value, got '{spec}'")))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(CliError::Usage(format!("bad --set key '{key}'")));
    }
    let value = parse_value(raw.trim());
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("non-empty key");
    let mut table = root;
    for p in parts {
        table = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("--set {key}: '{p}' is not a table")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
