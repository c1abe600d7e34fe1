//! Batch front end: run configuration, experiment suites, reports and
//! path-file conversion.

pub mod config;
pub mod convert;
pub mod corpus;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;

use config::RunConfig;
use report::Header;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] hoferlike::Error),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hoferlike",
    version,
    about = "Run an experiment suite",
    after_help = "suites: hodge flux lengths loop scaling fragment twoparam flux0 displace duality iterates\n\
                  conversion: hoferlike convert INPUT --to json|binary [--output FILE]"
)]
pub struct SuiteArgs {
    pub suite: String,
    /// TOML run configuration; defaults apply to missing keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set grid.n=64`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub parallel: Option<u64>,
}

#[derive(Debug, Parser)]
#[command(
    name = "hoferlike convert",
    about = "Convert a path file between binary and JSON"
)]
pub struct ConvertArgs {
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub to: convert::Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Outcome of a suite run.
pub struct Outcome {
    pub dir: PathBuf,
    pub output: report::SuiteOutput,
}

/// Load the configuration a suite invocation describes.
pub fn resolve_config(args: &SuiteArgs) -> Result<RunConfig, CliError> {
    let mut overrides = args.set.clone();
    if let Some(seed) = args.seed {
        overrides.push(format!("seed={seed}"));
    }
    let mut cfg = match &args.config {
        Some(p) => RunConfig::from_file(p, &overrides)?,
        None => RunConfig::load("", &overrides)?,
    };
    if let Some(out) = &args.out {
        cfg.out = out.to_string_lossy().into_owned();
    }
    Ok(cfg)
}

/// Run `suite` and write its report under `<out>/<suite>/`.
pub fn run_suite(suite: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let output = suites::run(suite, cfg)?;
    let header = Header {
        schema: report::SCHEMA,
        suite: suite.into(),
        version: env!("CARGO_PKG_VERSION"),
        config_sha256: cfg.digest(),
        seed: cfg.seed,
    };
    let dir = Path::new(&cfg.out).join(suite);
    report::write(&dir, &header, &output)?;
    Ok(Outcome { dir, output })
}

fn suite_main(args: SuiteArgs) -> Result<i32, CliError> {
    if !suites::SUITES.contains(&args.suite.as_str()) {
        return Err(CliError::Usage(format!(
            "unknown suite '{}' (expected one of: {}, convert)",
            args.suite,
            suites::SUITES.join(", ")
        )));
    }
    let cfg = resolve_config(&args)?;
    let run = || run_suite(&args.suite, &cfg);
    let outcome = match args.parallel {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k as usize)
            .build()
            .map_err(|e| CliError::Usage(format!("--parallel: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let mut stdout = std::io::stdout().lock();
    for c in &outcome.output.checks {
        let _ = writeln!(stdout, "{c}");
    }
    let pass = outcome.output.pass();
    let _ = writeln!(
        stdout,
        "{}: {} ({} checks, report in {})",
        args.suite,
        if pass { "pass" } else { "FAIL" },
        outcome.output.checks.len(),
        outcome.dir.display()
    );
    if !pass {
        for c in outcome.output.failures() {
            eprintln!("failed: {c}");
        }
    }
    Ok(if pass { 0 } else { 1 })
}

fn convert_main(args: ConvertArgs) -> Result<i32, CliError> {
    let out = convert::convert(&args.input, args.to, args.output.as_deref())?;
    println!("wrote {}", out.display());
    Ok(0)
}

fn parse_or_exit<P: Parser>(argv: Vec<OsString>) -> Result<P, i32> {
    P::try_parse_from(argv).map_err(|e| {
        let _ = e.print();
        if e.use_stderr() {
            2
        } else {
            0
        }
    })
}

/// Entry point; returns the process exit code.
pub fn main_with_args<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let argv: Vec<OsString> = args.into_iter().collect();
    let result = if argv.get(1).is_some_and(|a| a == "convert") {
        let mut rest = vec![OsString::from("hoferlike convert")];
        rest.extend(argv.into_iter().skip(2));
        match parse_or_exit::<ConvertArgs>(rest) {
            Ok(a) => convert_main(a),
            Err(code) => return code,
        }
    } else {
        match parse_or_exit::<SuiteArgs>(argv) {
            Ok(a) => suite_main(a),
            Err(code) => return code,
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
