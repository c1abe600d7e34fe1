//! The experiment suites. Each returns its checks, report data and tables.

mod displace;
mod duality;
mod flux;
mod flux0;
mod fragment;
mod hodge;
mod iterates;
mod lengths;
mod loops;
mod scaling;
mod twoparam;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::report::SuiteOutput;
use crate::CliError;

pub const SUITES: [&str; 11] = [
    "hodge", "flux", "lengths", "loop", "scaling", "fragment", "twoparam", "flux0", "displace",
    "duality", "iterates",
];

pub struct Ctx<'a> {
    pub cfg: &'a RunConfig,
}

/// Per-suite stream: the run seed mixed with the suite name, so suites do
/// not share random draws.
pub(crate) fn rng(seed: u64, suite: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(suite.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

pub fn run(name: &str, cfg: &RunConfig) -> Result<SuiteOutput, CliError> {
    let ctx = Ctx { cfg };
    match name {
        "hodge" => hodge::run(&ctx),
        "flux" => flux::run(&ctx),
        "lengths" => lengths::run(&ctx),
        "loop" => loops::run(&ctx),
        "scaling" => scaling::run(&ctx),
        "fragment" => fragment::run(&ctx),
        "twoparam" => twoparam::run(&ctx),
        "flux0" => flux0::run(&ctx),
        "displace" => displace::run(&ctx),
        "duality" => duality::run(&ctx),
        "iterates" => iterates::run(&ctx),
        other => Err(CliError::Usage(format!(
            "unknown suite '{other}' (expected one of: {})",
            SUITES.join(", ")
        ))),
    }
}
