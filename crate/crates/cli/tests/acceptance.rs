//! One line per acceptance criterion. Suites run at their default
//! settings; every check must exist, pass, and carry a limit no looser
//! than the stated tolerance.

use std::collections::BTreeMap;
use std::path::Path;

use hoferlike_cli::config::RunConfig;
use hoferlike_cli::report::{Check, SuiteOutput};
use hoferlike_cli::run_suite;
use hoferlike_cli::suites::SUITES;

/// Checks named `pattern`, or `<label>: pattern`; `bound` caps the limit for `<=`
/// checks and floors it for `>=` checks.
struct Want {
    suite: &'static str,
    pattern: &'static str,
    bound: Option<f64>,
    count: usize,
}

const fn want(suite: &'static str, pattern: &'static str, bound: Option<f64>) -> Want {
    Want {
        suite,
        pattern,
        bound,
        count: 1,
    }
}

const fn want_n(
    suite: &'static str,
    pattern: &'static str,
    bound: Option<f64>,
    count: usize,
) -> Want {
    Want {
        suite,
        pattern,
        bound,
        count,
    }
}

fn tight(c: &Check, bound: Option<f64>) -> bool {
    match (bound, c.relation) {
        (None, _) => true,
        (Some(b), "<=") => c.limit <= b + 1e-12 * b.abs(),
        (Some(b), ">=") => c.limit >= b - 1e-12 * b.abs(),
        _ => false,
    }
}

fn verify(outputs: &BTreeMap<&str, SuiteOutput>, wants: &[Want]) -> Result<usize, String> {
    let mut seen = 0;
    for w in wants {
        let out = &outputs[w.suite];
        let hits: Vec<&Check> = out
            .checks
            .iter()
            .filter(|c| c.name == w.pattern || c.name.ends_with(&format!(": {}", w.pattern)))
            .collect();
        if hits.len() < w.count {
            return Err(format!(
                "{}: expected {} checks matching '{}', found {}",
                w.suite,
                w.count,
                w.pattern,
                hits.len()
            ));
        }
        for c in hits {
            if !c.pass {
                return Err(format!("{}: {c}", w.suite));
            }
            if !tight(c, w.bound) {
                return Err(format!(
                    "{}: '{}' limit {:e} looser than {:e}",
                    w.suite,
                    c.name,
                    c.limit,
                    w.bound.unwrap()
                ));
            }
            seen += 1;
        }
    }
    Ok(seen)
}

fn defaults(out: &Path) -> RunConfig {
    let mut cfg = RunConfig::load("", &[]).unwrap();
    cfg.out = out.to_string_lossy().into_owned();
    cfg
}

/// Reduced sizes: every suite in a few seconds, same code paths.
fn small(out: &Path) -> RunConfig {
    let sets: Vec<String> = [
        "grid.n=32",
        "grid.samples=16",
        "grid.s=16",
        "hodge.forms=4",
        "hodge.angles=64",
        "flux.paths=6",
        "flux.pairs=2",
        "lengths.generators=6",
        "lengths.calabi=6",
        "lengths.pairs=2",
        "loop.range=1",
        "scaling.generators=2",
        "fragment.pieces=6",
        "twoparam.n=16",
        "twoparam.families=3",
        "estimator.n=8",
        "estimator.budget=10",
        "estimator.restarts=1",
        "iterates.k_max=5",
        "seed=11",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut cfg = RunConfig::load("", &sets).unwrap();
    cfg.out = out.to_string_lossy().into_owned();
    cfg
}

fn report_bytes(dir: &Path, suite: &str) -> Vec<u8> {
    std::fs::read(dir.join(suite).join("report.json")).unwrap()
}

fn determinism(first: &Path) -> Result<usize, String> {
    let again = tempfile::tempdir().unwrap();
    let cfg = defaults(again.path());
    let cheap = [
        "hodge", "lengths", "scaling", "displace", "duality", "iterates",
    ];
    for suite in cheap {
        run_suite(suite, &cfg).map_err(|e| e.to_string())?;
        if report_bytes(first, suite) != report_bytes(again.path(), suite) {
            return Err(format!("{suite}: report changed on rerun at defaults"));
        }
    }
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap();
    for suite in SUITES {
        run_suite(suite, &small(a.path())).map_err(|e| e.to_string())?;
        pool.install(|| run_suite(suite, &small(b.path())))
            .map_err(|e| e.to_string())?;
        if report_bytes(a.path(), suite) != report_bytes(b.path(), suite) {
            return Err(format!("{suite}: report changed between reruns"));
        }
    }
    Ok(cheap.len() + SUITES.len())
}

#[test]
fn acceptance_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = defaults(dir.path());
    assert_eq!((cfg.grid.n, cfg.grid.samples), (128, 64));
    let mut outputs = BTreeMap::new();
    for suite in SUITES {
        let outcome = run_suite(suite, &cfg).unwrap_or_else(|e| panic!("{suite}: {e}"));
        outputs.insert(suite, outcome.output);
    }

    let criteria: Vec<(&str, Vec<Want>)> = vec![
        (
            "hodge decomposition on 100 random closed forms",
            vec![
                want("hodge", "reconstruction residual", Some(1e-8)),
                want("hodge", "exact/harmonic orthogonality", Some(1e-9)),
                want("hodge", "harmonic projection idempotent", None),
                want("hodge", "|L0 - 1|", Some(1e-5)),
                want("hodge", "|L1 - 1|", Some(1e-5)),
            ],
        ),
        (
            "flux two ways, homomorphism, concatenation",
            vec![
                want("flux", "flux definition vs cohomological", Some(1e-5)),
                want("flux", "Hamiltonian flux", Some(1e-5)),
                want("flux", "flux additivity under composition", Some(1e-5)),
                want("flux", "flux of concatenation vs composition", Some(1e-5)),
            ],
        ),
        (
            "harmonic loops exactly on integer classes",
            vec![
                want("loop", "integer class residual", Some(1e-6)),
                want("loop", "half-integer class residual", Some(0.1)),
                want("loop", "is_loop exactly on integer classes", None),
            ],
        ),
        (
            "length additivity, monotonicity, flux floor, Calabi",
            vec![
                want("lengths", "concatenation additivity", Some(1e-3)),
                want("lengths", "monotonicity violations in p", Some(0.0)),
                want("lengths", "flux norm - l_HL(1,2)", Some(1e-8)),
                want("lengths", "|Cal| - l_H", Some(1e-9)),
            ],
        ),
        (
            "scaling law under omega -> c omega",
            vec![
                want("scaling", "n = 1: |rescaled - c l_HL|", Some(1e-10)),
                want("scaling", "n > 1: distance outside [low, high]", Some(0.0)),
            ],
        ),
        (
            "two-parameter Gronwall and oscillation bounds",
            vec![
                want_n("twoparam", "Gronwall", None, 10),
                want_n("twoparam", "oscillation bound", None, 10),
                want("twoparam", "constant X: |sup V - |X|/4|", Some(1e-6)),
            ],
        ),
        (
            "fragmentation weights, lengths and recovery",
            vec![
                want("fragment", "|sum nu_k - 1|", Some(1e-12)),
                want("fragment", "harmonic sum residual", Some(1e-12)),
                want("fragment", "per-piece l_HL^inf - nu_k sup|H|", Some(1e-12)),
                want(
                    "fragment",
                    "recovered harmonic part of the composition",
                    Some(2e-3),
                ),
                want("fragment", "piece lengths strictly decreasing", None),
                want("fragment", "pieces past N0 below eps * l_HL^inf", None),
            ],
        ),
        (
            "Hofer-like energy equals Hofer energy on Hamiltonian targets",
            vec![
                want_n("flux0", "|E_HL - E_H|", Some(5e-2), 5),
                want_n("flux0", "attachments not better", None, 5),
            ],
        ),
        (
            "duality upper bound and iterate floors",
            vec![
                want("duality", "constant path: |value - |flux||", Some(1e-6)),
                want(
                    "duality",
                    "A_hat (constant path upper bound)",
                    Some(1.0 + 1e-6),
                ),
                want_n(
                    "iterates",
                    "distances vanish exactly on lattice hits",
                    None,
                    5,
                ),
                want_n("iterates", "floor", None, 2),
            ],
        ),
        (
            "strip displacement bracket",
            vec![
                want("displace", "strip 0.2: upper", Some(0.25 + 5e-2)),
                want(
                    "displace",
                    "strip 0.2: |lower - min(1, m'')/2|",
                    Some(1e-12),
                ),
                want("displace", "strip 0.2: lower > 0", None),
                want("displace", "strip 0.2: upper >= lower", None),
            ],
        ),
    ];

    let mut failed = Vec::new();
    for (i, (label, wants)) in criteria.iter().enumerate() {
        match verify(&outputs, wants) {
            Ok(n) => println!("criterion {:2} PASS  {label} ({n} checks)", i + 1),
            Err(e) => {
                println!("criterion {:2} FAIL  {label}: {e}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    match determinism(dir.path()) {
        Ok(n) => println!("criterion 11 PASS  byte-identical reports on rerun ({n} comparisons)"),
        Err(e) => {
            println!("criterion 11 FAIL  determinism: {e}");
            failed.push(11);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
