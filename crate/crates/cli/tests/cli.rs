use std::path::Path;
use std::process::{Command, Output};

use hoferlike::io::{encode_path, PathFile};
use hoferlike::isotopy::{integrate_generator, GeneratorPath};
use hoferlike::{HarmonicForm, TorusGrid};
use serde_json::Value;

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hoferlike"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: [&str; 6] = [
    "--set",
    "grid.n=16",
    "--set",
    "grid.samples=16",
    "--set",
    "scaling.generators=2",
];

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    assert_eq!(code(&run(&[], cwd)), 2);
    let bogus = run(&["bogus"], cwd);
    assert_eq!(code(&bogus), 2);
    assert!(stderr(&bogus).contains("unknown suite 'bogus'"));
    assert_eq!(code(&run(&["scaling", "--set", "nope=1"], cwd)), 2);
    assert_eq!(code(&run(&["scaling", "--set", "grid.n=7"], cwd)), 2);
    assert_eq!(code(&run(&["scaling", "--set", "grid.n"], cwd)), 2);
    assert_eq!(code(&run(&["scaling", "--parallel", "0"], cwd)), 2);
    assert_eq!(code(&run(&["scaling", "--config", "missing.toml"], cwd)), 2);
    std::fs::write(cwd.join("bad.toml"), "[grid]\nwidth = 3\n").unwrap();
    assert_eq!(code(&run(&["scaling", "--config", "bad.toml"], cwd)), 2);
    assert_eq!(code(&run(&["--help"], cwd)), 0);
    assert!(cwd
        .read_dir()
        .unwrap()
        .all(|e| e.unwrap().file_name() == "bad.toml"));
}

#[test]
fn suite_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    std::fs::write(
        cwd.join("run.toml"),
        "seed = 3\n[scaling]\nfactors = [2.0]\n",
    )
    .unwrap();
    let mut args = vec![
        "scaling",
        "--config",
        "run.toml",
        "--out",
        "o",
        "--seed",
        "9",
        "--parallel",
        "2",
    ];
    args.extend(SMALL);
    let o = run(&args, cwd);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("scaling: pass"));

    let report: Value =
        serde_json::from_slice(&std::fs::read(cwd.join("o/scaling/report.json")).unwrap()).unwrap();
    assert_eq!(report["header"]["schema"], "hoferlike-report/1");
    assert_eq!(report["header"]["seed"], 9);
    assert_eq!(report["pass"], true);
    assert_eq!(
        report["header"]["config_sha256"].as_str().unwrap().len(),
        64
    );

    let csv = std::fs::read_to_string(cwd.join("o/scaling/scaling.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 3);
    for r in rows {
        let f = |name: &str| r[col(name)].parse::<f64>().unwrap();
        assert_eq!(f("c"), 2.0);
        let (c, n) = (f("c"), f("n"));
        let ratio = f("ratio");
        assert!((ratio - f("rescaled") / f("original")).abs() <= 1e-12);
        let slack = 1e-12 * f("high");
        assert!(f("low") - slack <= f("rescaled") && f("rescaled") <= f("high") + slack);
        let (a, b) = (c, c.powf((n + 1.0) / 2.0));
        assert!(a.min(b) - 1e-12 <= ratio && ratio <= a.max(b) + 1e-12);
    }
}

#[test]
fn seed_and_out_do_not_change_digest_except_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    let digest = |out: &str, seed: &str| {
        let mut args = vec!["scaling", "--out", out, "--seed", seed];
        args.extend(SMALL);
        assert_eq!(code(&run(&args, cwd)), 0);
        let r: Value = serde_json::from_slice(
            &std::fs::read(cwd.join(out).join("scaling/report.json")).unwrap(),
        )
        .unwrap();
        r["header"]["config_sha256"].as_str().unwrap().to_string()
    };
    let a = digest("a", "1");
    assert_eq!(a, digest("b", "1"));
    assert_ne!(a, digest("c", "2"));
    assert_eq!(
        std::fs::read(cwd.join("a/scaling/report.json")).unwrap(),
        std::fs::read(cwd.join("b/scaling/report.json")).unwrap()
    );
}

#[test]
fn failing_check_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "flux",
            "--out",
            "o",
            "--set",
            "grid.n=8",
            "--set",
            "grid.samples=16",
            "--set",
            "flux.paths=3",
            "--set",
            "flux.pairs=1",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("failed: FAIL"));
    let report: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("o/flux/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["pass"], false);
}

fn sample_files(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let grid = TorusGrid::new(8).unwrap();
    let gen = GeneratorPath::from_fn(grid, 16, |t| {
        let u = hoferlike::ScalarField::from_fn(grid, |x, y| {
            0.1 * t * (std::f64::consts::TAU * (x + 2.0 * y)).sin()
        });
        (u, HarmonicForm::new(0.3, -0.1 * t))
    })
    .unwrap();
    let path = integrate_generator(&gen, 2).unwrap();
    let g = dir.join("gen.hlp");
    let d = dir.join("path.hlp");
    std::fs::write(&g, encode_path(&PathFile::Generator(gen))).unwrap();
    std::fs::write(&d, encode_path(&PathFile::Diffeo(path))).unwrap();
    (g, d)
}

#[test]
fn convert_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    sample_files(cwd);
    for stem in ["gen", "path"] {
        let o = run(&["convert", &format!("{stem}.hlp"), "--to", "json"], cwd);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let o = run(
            &[
                "convert",
                &format!("{stem}.json"),
                "--to",
                "binary",
                "--output",
                "back.hlp",
            ],
            cwd,
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert_eq!(
            std::fs::read(cwd.join(format!("{stem}.hlp"))).unwrap(),
            std::fs::read(cwd.join("back.hlp")).unwrap()
        );
        let o = run(
            &[
                "convert",
                "back.hlp",
                "--to",
                "json",
                "--output",
                "again.json",
            ],
            cwd,
        );
        assert_eq!(code(&o), 0);
        assert_eq!(
            std::fs::read(cwd.join(format!("{stem}.json"))).unwrap(),
            std::fs::read(cwd.join("again.json")).unwrap()
        );
    }
}

#[test]
fn generator_json_carries_u_stats_and_h() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    sample_files(cwd);
    assert_eq!(code(&run(&["convert", "gen.hlp", "--to", "json"], cwd)), 0);
    let v: Value = serde_json::from_slice(&std::fs::read(cwd.join("gen.json")).unwrap()).unwrap();
    assert_eq!(v["kind"], "generator");
    assert_eq!(v["samples"], 16);
    let data = v["data"].as_array().unwrap();
    assert_eq!(data.len(), 17);
    let last = &data[16];
    assert_eq!(last["t"], 1.0);
    assert_eq!(last["h"][0], 0.3);
    assert_eq!(last["h"][1], -0.1);
    let stats = &last["u_stats"];
    let osc = stats["max"].as_f64().unwrap() - stats["min"].as_f64().unwrap();
    assert!((stats["osc"].as_f64().unwrap() - osc).abs() < 1e-15);
    assert!(osc > 0.1 && osc <= 0.2 + 1e-12);
}

#[test]
fn truncated_file_reports_offset_and_section() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    let (_, d) = sample_files(cwd);
    let bytes = std::fs::read(&d).unwrap();
    std::fs::write(cwd.join("cut.hlp"), &bytes[..bytes.len() - 100]).unwrap();
    let o = run(&["convert", "cut.hlp", "--to", "json"], cwd);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("parse error at byte"), "{err}");
    assert!(err.contains("sample 16 of 16"), "{err}");
    assert!(!cwd.join("cut.json").exists());

    std::fs::write(cwd.join("junk.hlp"), b"HLP").unwrap();
    let err = stderr(&run(&["convert", "junk.hlp", "--to", "json"], cwd));
    assert!(err.contains("parse error at byte 0"), "{err}");
}

#[test]
fn convert_refuses_to_overwrite_input() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    sample_files(cwd);
    let o = run(&["convert", "gen.hlp", "--to", "binary"], cwd);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&run(&["convert", "gen.hlp", "--to", "yaml"], cwd)), 2);
    assert_eq!(
        code(&run(&["convert", "nothere.hlp", "--to", "json"], cwd)),
        1
    );
}

/// Splits a CSV line, honouring double-quoted fields.
fn csv_cells(line: &str) -> Vec<String> {
    let (mut cells, mut cur, mut quoted) = (Vec::new(), String::new(), false);
    for ch in line.chars() {
        match ch {
            '"' => quoted = !quoted,
            ',' if !quoted => cells.push(std::mem::take(&mut cur)),
            c => cur.push(c),
        }
    }
    cells.push(cur);
    cells
}

#[test]
fn lengths_csv_quotes_functional_names() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    let o = run(
        &[
            "lengths",
            "--out",
            "o",
            "--set",
            "grid.n=16",
            "--set",
            "grid.samples=16",
            "--set",
            "lengths.generators=3",
            "--set",
            "lengths.calabi=2",
            "--set",
            "lengths.pairs=1",
        ],
        cwd,
    );
    assert!(code(&o) <= 1, "{}", stderr(&o));
    let csv = std::fs::read_to_string(cwd.join("o/lengths/lengths.csv")).unwrap();
    let rows: Vec<Vec<String>> = csv.lines().map(csv_cells).collect();
    assert!(rows.len() > 1);
    assert!(rows.iter().all(|r| r.len() == rows[0].len()), "{csv}");
    assert!(rows.iter().any(|r| r[1] == "hl(1,2)"));
}
