//! Binary containers for fields and paths, and their JSON mirror.
//!
//! Field record (`HLF1`), little endian:
//!
//! ```text
//! magic  "HLF1"
//! kind   u8    0 scalar, 1 one-form, 2 vector field, 3 displacement
//! n      u32   grid size
//! comps  u32   component count (1 or 2)
//! data   comps * n * n f64, component-major, node index j * n + i
//! ```
//!
//! Path file (`HLP1`): magic, kind `u8` (0 generator, 1 diffeotopy), `n`
//! `u32`, `T` `u32`, source `u8` (diffeotopies only, see [`PathSource`]),
//! then `T + 1` samples. A generator sample is a scalar field record for
//! `U_t` followed by the harmonic coefficients `a, b` as two f64; a
//! diffeotopy sample is a displacement record.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Displacement, HarmonicForm, ScalarField, TorusGrid};
use crate::isotopy::{DiffeoPath, GeneratorPath, PathSource};

pub const FIELD_MAGIC: &[u8; 4] = b"HLF1";
pub const PATH_MAGIC: &[u8; 4] = b"HLP1";
pub const JSON_FORMAT: &str = "hoferlike-path";
pub const JSON_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Scalar,
    OneForm,
    VectorField,
    Displacement,
}

impl FieldKind {
    fn code(self) -> u8 {
        match self {
            FieldKind::Scalar => 0,
            FieldKind::OneForm => 1,
            FieldKind::VectorField => 2,
            FieldKind::Displacement => 3,
        }
    }

    fn from_code(c: u8) -> Option<Self> {
        Some(match c {
            0 => FieldKind::Scalar,
            1 => FieldKind::OneForm,
            2 => FieldKind::VectorField,
            3 => FieldKind::Displacement,
            _ => return None,
        })
    }

    pub fn components(self) -> usize {
        match self {
            FieldKind::Scalar => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldRecord {
    pub kind: FieldKind,
    pub n: usize,
    pub components: Vec<Vec<f64>>,
}

pub fn write_field(rec: &FieldRecord, out: &mut Vec<u8>) {
    out.extend_from_slice(FIELD_MAGIC);
    out.push(rec.kind.code());
    out.extend_from_slice(&(rec.n as u32).to_le_bytes());
    out.extend_from_slice(&(rec.components.len() as u32).to_le_bytes());
    for c in &rec.components {
        for v in c {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < len {
            return Err(Error::Parse {
                offset: self.bytes.len(),
                message: format!("truncated: missing {what}"),
            });
        }
        let s = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn fail<T>(&self, at: usize, message: String) -> Result<T> {
        Err(Error::Parse {
            offset: at,
            message,
        })
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4, what)?.try_into().expect("4 bytes"),
        ))
    }

    fn f64s(&mut self, count: usize, what: &str) -> Result<Vec<f64>> {
        let raw = self.take(count * 8, what)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }

    fn magic(&mut self, want: &[u8; 4], what: &str) -> Result<()> {
        let at = self.pos;
        if self.take(4, what)? != want {
            return self.fail(
                at,
                format!(
                    "bad magic in {what}, expected {}",
                    String::from_utf8_lossy(want)
                ),
            );
        }
        Ok(())
    }

    fn field(&mut self, what: &str) -> Result<FieldRecord> {
        self.magic(FIELD_MAGIC, &format!("{what} header"))?;
        let at = self.pos;
        let kind = FieldKind::from_code(self.u8(&format!("{what} kind"))?);
        let Some(kind) = kind else {
            return self.fail(at, format!("unknown field kind in {what}"));
        };
        let at = self.pos;
        let n = self.u32(&format!("{what} grid size"))? as usize;
        if TorusGrid::new(n).is_err() {
            return self.fail(at, format!("invalid grid size {n} in {what}"));
        }
        let at = self.pos;
        let comps = self.u32(&format!("{what} component count"))? as usize;
        if comps != kind.components() {
            return self.fail(
                at,
                format!("{what}: {comps} components for a {kind:?} field"),
            );
        }
        let components = (0..comps)
            .map(|c| self.f64s(n * n, &format!("{what} payload (component {c})")))
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldRecord {
            kind,
            n,
            components,
        })
    }
}

pub fn read_field(bytes: &[u8]) -> Result<FieldRecord> {
    let mut r = Reader { bytes, pos: 0 };
    let rec = r.field("field")?;
    if r.pos != bytes.len() {
        return r.fail(r.pos, "trailing bytes after field".into());
    }
    Ok(rec)
}

/// Contents of a path file.
#[derive(Debug, Clone, PartialEq)]
pub enum PathFile {
    Generator(GeneratorPath),
    Diffeo(DiffeoPath),
}

fn source_code(s: PathSource) -> u8 {
    match s {
        PathSource::Integrated => 0,
        PathSource::Composed => 1,
        PathSource::Concatenated => 2,
        PathSource::Reversed => 3,
        PathSource::Sampled => 4,
    }
}

fn source_from_code(c: u8) -> Option<PathSource> {
    Some(match c {
        0 => PathSource::Integrated,
        1 => PathSource::Composed,
        2 => PathSource::Concatenated,
        3 => PathSource::Reversed,
        4 => PathSource::Sampled,
        _ => return None,
    })
}

pub fn encode_path(file: &PathFile) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(PATH_MAGIC);
    match file {
        PathFile::Generator(g) => {
            out.push(0);
            out.extend_from_slice(&(g.grid().n() as u32).to_le_bytes());
            out.extend_from_slice(&(g.samples() as u32).to_le_bytes());
            for (u, h) in g.u().iter().zip(g.h()) {
                let rec = FieldRecord {
                    kind: FieldKind::Scalar,
                    n: g.grid().n(),
                    components: vec![u.values.clone()],
                };
                write_field(&rec, &mut out);
                out.extend_from_slice(&h.a.to_le_bytes());
                out.extend_from_slice(&h.b.to_le_bytes());
            }
        }
        PathFile::Diffeo(d) => {
            out.push(1);
            out.extend_from_slice(&(d.grid().n() as u32).to_le_bytes());
            out.extend_from_slice(&(d.samples() as u32).to_le_bytes());
            out.push(source_code(d.source()));
            for disp in d.displacements() {
                let rec = FieldRecord {
                    kind: FieldKind::Displacement,
                    n: d.grid().n(),
                    components: vec![disp.dx.clone(), disp.dy.clone()],
                };
                write_field(&rec, &mut out);
            }
        }
    }
    out
}

pub fn decode_path(bytes: &[u8]) -> Result<PathFile> {
    let mut r = Reader { bytes, pos: 0 };
    r.magic(PATH_MAGIC, "path header")?;
    let at = r.pos;
    let kind = r.u8("path kind")?;
    if kind > 1 {
        return r.fail(at, format!("unknown path kind {kind}"));
    }
    let at = r.pos;
    let n = r.u32("grid size")? as usize;
    let grid = match TorusGrid::new(n) {
        Ok(g) => g,
        Err(_) => return r.fail(at, format!("invalid grid size {n}")),
    };
    let samples = r.u32("sample count")? as usize;
    let file = if kind == 0 {
        let mut us = Vec::with_capacity(samples + 1);
        let mut hs = Vec::with_capacity(samples + 1);
        for k in 0..=samples {
            let at = r.pos;
            let rec = r.field(&format!("sample {k} of {samples} (U)"))?;
            if rec.kind != FieldKind::Scalar || rec.n != n {
                return r.fail(
                    at,
                    format!("sample {k}: expected a scalar field on N = {n}"),
                );
            }
            let h = r.f64s(2, &format!("sample {k} of {samples} (H)"))?;
            us.push(ScalarField {
                grid,
                values: rec.components.into_iter().next().expect("one component"),
            });
            hs.push(HarmonicForm::new(h[0], h[1]));
        }
        PathFile::Generator(GeneratorPath::new(us, hs)?)
    } else {
        let at = r.pos;
        let code = r.u8("path source")?;
        let Some(source) = source_from_code(code) else {
            return r.fail(at, format!("unknown path source {code}"));
        };
        let mut disp = Vec::with_capacity(samples + 1);
        for k in 0..=samples {
            let at = r.pos;
            let rec = r.field(&format!("sample {k} of {samples} (displacement)"))?;
            if rec.kind != FieldKind::Displacement || rec.n != n {
                return r.fail(
                    at,
                    format!("sample {k}: expected a displacement on N = {n}"),
                );
            }
            let mut it = rec.components.into_iter();
            disp.push(Displacement {
                grid,
                dx: it.next().expect("two components"),
                dy: it.next().expect("two components"),
            });
        }
        PathFile::Diffeo(DiffeoPath::new(disp, source)?)
    };
    if r.pos != bytes.len() {
        return r.fail(r.pos, "trailing bytes after last sample".into());
    }
    Ok(file)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UStats {
    pub min: f64,
    pub max: f64,
    pub osc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonSample {
    Generator {
        t: f64,
        u_stats: UStats,
        h: [f64; 2],
        u: Vec<f64>,
    },
    Diffeo {
        t: f64,
        dx: Vec<f64>,
        dy: Vec<f64>,
    },
}

/// JSON form of a path file. Floats are written in shortest round-trip
/// form, so converting back reproduces the binary payload bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonPath {
    pub format: String,
    pub version: u32,
    pub kind: String,
    pub n: usize,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<PathSource>,
    pub data: Vec<JsonSample>,
}

pub fn path_to_json(file: &PathFile) -> JsonPath {
    match file {
        PathFile::Generator(g) => JsonPath {
            format: JSON_FORMAT.into(),
            version: JSON_VERSION,
            kind: "generator".into(),
            n: g.grid().n(),
            samples: g.samples(),
            source: None,
            data: g
                .u()
                .iter()
                .zip(g.h())
                .enumerate()
                .map(|(k, (u, h))| {
                    let min = u.values.iter().copied().fold(f64::INFINITY, f64::min);
                    let max = u.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    JsonSample::Generator {
                        t: g.time(k),
                        u_stats: UStats {
                            min,
                            max,
                            osc: max - min,
                        },
                        h: [h.a, h.b],
                        u: u.values.clone(),
                    }
                })
                .collect(),
        },
        PathFile::Diffeo(d) => JsonPath {
            format: JSON_FORMAT.into(),
            version: JSON_VERSION,
            kind: "diffeo".into(),
            n: d.grid().n(),
            samples: d.samples(),
            source: Some(d.source()),
            data: d
                .displacements()
                .iter()
                .enumerate()
                .map(|(k, disp)| JsonSample::Diffeo {
                    t: k as f64 / d.samples() as f64,
                    dx: disp.dx.clone(),
                    dy: disp.dy.clone(),
                })
                .collect(),
        },
    }
}

fn json_error(text: &str, e: serde_json::Error) -> Error {
    let offset = text
        .split_inclusive('\n')
        .take(e.line().saturating_sub(1))
        .map(str::len)
        .sum::<usize>()
        + e.column().saturating_sub(1);
    Error::Parse {
        offset,
        message: e.to_string(),
    }
}

pub fn path_from_json(text: &str) -> Result<PathFile> {
    let j: JsonPath = serde_json::from_str(text).map_err(|e| json_error(text, e))?;
    let bad = |message: String| Error::Parse { offset: 0, message };
    if j.format != JSON_FORMAT || j.version != JSON_VERSION {
        return Err(bad(format!(
            "unsupported format {} v{}",
            j.format, j.version
        )));
    }
    let grid = TorusGrid::new(j.n).map_err(|e| bad(e.to_string()))?;
    if j.data.len() != j.samples + 1 {
        return Err(bad(format!(
            "expected {} samples, found {}",
            j.samples + 1,
            j.data.len()
        )));
    }
    let len = grid.len();
    match j.kind.as_str() {
        "generator" => {
            let mut us = Vec::with_capacity(j.data.len());
            let mut hs = Vec::with_capacity(j.data.len());
            for (k, s) in j.data.into_iter().enumerate() {
                let JsonSample::Generator { u, h, .. } = s else {
                    return Err(bad(format!("sample {k} is not a generator sample")));
                };
                if u.len() != len {
                    return Err(bad(format!(
                        "sample {k}: {} values for N = {}",
                        u.len(),
                        j.n
                    )));
                }
                us.push(ScalarField { grid, values: u });
                hs.push(HarmonicForm::new(h[0], h[1]));
            }
            Ok(PathFile::Generator(GeneratorPath::new(us, hs)?))
        }
        "diffeo" => {
            let mut disp = Vec::with_capacity(j.data.len());
            for (k, s) in j.data.into_iter().enumerate() {
                let JsonSample::Diffeo { dx, dy, .. } = s else {
                    return Err(bad(format!("sample {k} is not a displacement sample")));
                };
                if dx.len() != len || dy.len() != len {
                    return Err(bad(format!(
                        "sample {k}: wrong number of values for N = {}",
                        j.n
                    )));
                }
                disp.push(Displacement { grid, dx, dy });
            }
            let source = j.source.unwrap_or(PathSource::Sampled);
            Ok(PathFile::Diffeo(DiffeoPath::new(disp, source)?))
        }
        other => Err(bad(format!("unknown path kind {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isotopy::integrate_generator;
    use std::f64::consts::PI;

    fn gen() -> GeneratorPath {
        let grid = TorusGrid::new(8).unwrap();
        GeneratorPath::from_fn(grid, 16, |t| {
            (
                ScalarField::from_fn(grid, |x, y| {
                    0.1 * t * (2.0 * PI * x).sin() + (2.0 * PI * y).cos() / 3.0
                }),
                HarmonicForm::new(0.1 * t, -0.7),
            )
        })
        .unwrap()
    }

    #[test]
    fn binary_round_trip() {
        let g = PathFile::Generator(gen());
        let bytes = encode_path(&g);
        assert_eq!(decode_path(&bytes).unwrap(), g);
        let d = PathFile::Diffeo(integrate_generator(&gen(), 2).unwrap());
        let bytes = encode_path(&d);
        assert_eq!(encode_path(&decode_path(&bytes).unwrap()), bytes);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        for file in [
            PathFile::Generator(gen()),
            PathFile::Diffeo(integrate_generator(&gen(), 2).unwrap()),
        ] {
            let bytes = encode_path(&file);
            let text = serde_json::to_string(&path_to_json(&file)).unwrap();
            assert_eq!(encode_path(&path_from_json(&text).unwrap()), bytes);
        }
    }

    #[test]
    fn truncation_names_the_section() {
        let bytes = encode_path(&PathFile::Generator(gen()));
        match decode_path(&bytes[..bytes.len() - 4]) {
            Err(Error::Parse { offset, message }) => {
                assert_eq!(offset, bytes.len() - 4);
                assert!(message.contains("sample 16 of 16 (H)"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        match decode_path(&bytes[..6]) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("grid size")),
            other => panic!("{other:?}"),
        }
        match decode_path(b"HLX1rest") {
            Err(Error::Parse { offset: 0, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn field_records() {
        let rec = FieldRecord {
            kind: FieldKind::OneForm,
            n: 8,
            components: vec![vec![1.5; 64], vec![-0.25; 64]],
        };
        let mut out = Vec::new();
        write_field(&rec, &mut out);
        assert_eq!(out.len(), 13 + 2 * 64 * 8);
        assert_eq!(read_field(&out).unwrap(), rec);
        out[4] = 9;
        assert!(matches!(
            read_field(&out),
            Err(Error::Parse { offset: 4, .. })
        ));
    }

    #[test]
    fn json_errors_carry_offsets() {
        match path_from_json("{\"format\": 3}") {
            Err(Error::Parse { offset, .. }) => assert!(offset > 0),
            other => panic!("{other:?}"),
        }
    }
}
