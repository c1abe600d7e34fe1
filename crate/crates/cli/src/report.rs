//! Suite reports: JSON with a versioned header, plus CSV tables.

use std::fmt::Write as _;
use std::path::Path;

use hoferlike::functionals::csv_quote;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub const SCHEMA: &str = "hoferlike-report/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub schema: &'static str,
    pub suite: String,
    pub version: &'static str,
    pub config_sha256: String,
    pub seed: u64,
}

/// One assertion: `observed` compared against `limit` by `relation`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub observed: f64,
    pub relation: &'static str,
    pub limit: f64,
}

impl Check {
    pub fn le(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            pass: observed <= limit,
            observed,
            relation: "<=",
            limit,
        }
    }

    pub fn ge(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            pass: observed >= limit,
            observed,
            relation: ">=",
            limit,
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            pass: ok,
            observed: if ok { 1.0 } else { 0.0 },
            relation: "==",
            limit: 1.0,
        }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.pass { "ok  " } else { "FAIL" };
        write!(
            f,
            "{tag} {}: {:e} {} {:e}",
            self.name, self.observed, self.relation, self.limit
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&'static str]) -> Self {
        Self {
            name: name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| csv_quote(c)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }
}

/// Cell formatting shared by every table: shortest round-trip floats.
pub fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOutput {
    pub checks: Vec<Check>,
    pub data: serde_json::Map<String, Value>,
    pub tables: Vec<Table>,
}

impl SuiteOutput {
    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn data(&mut self, key: &str, value: impl Serialize) {
        self.data.insert(
            key.into(),
            serde_json::to_value(value).expect("report data serializes"),
        );
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Serialize)]
struct Report<'a> {
    header: &'a Header,
    pass: bool,
    checks: &'a [Check],
    data: &'a serde_json::Map<String, Value>,
}

pub fn render(header: &Header, out: &SuiteOutput) -> String {
    let report = Report {
        header,
        pass: out.pass(),
        checks: &out.checks,
        data: &out.data,
    };
    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
    s.push('\n');
    s
}

/// Writes `report.json` and one CSV per table into `dir`.
pub fn write(dir: &Path, header: &Header, out: &SuiteOutput) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let put = |name: &str, body: &str| {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
    };
    put("report.json", &render(header, out))?;
    for t in &out.tables {
        put(&format!("{}.csv", t.name), &t.to_csv())?;
    }
    Ok(())
}
