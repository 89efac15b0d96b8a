//! Verification suites. Each check is a plain function of the run options so the
//! acceptance runner and the CLI evaluate exactly the same code.

use std::time::{Duration, Instant};

use lowsing::symbols::SubordinatorSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::Check;

pub mod decomp;
pub mod montecarlo;
pub mod operator;
pub mod orlicz;
pub mod symbols;

/// Inputs shared by all checks.
#[derive(Debug, Clone)]
pub struct Options {
    pub seed: u64,
    /// Family used by the checks that are not tied to a fixed family.
    pub spec: SubordinatorSpec,
}

impl Options {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            spec: SubordinatorSpec::gamma(1).expect("gamma spec"),
        }
    }

    /// A generator for stream `stream` of this run.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

pub type CheckFn = fn(&Options) -> Check;

pub const SUITES: &[&str] = &["orlicz", "symbols", "decomp", "operator", "montecarlo", "all"];

/// The checks of a suite in execution order; `None` for an unknown name.
pub fn registry(suite: &str) -> Option<Vec<(&'static str, CheckFn)>> {
    Some(match suite {
        "orlicz" => orlicz::CHECKS.to_vec(),
        "symbols" => symbols::CHECKS.to_vec(),
        "decomp" => decomp::CHECKS.to_vec(),
        "operator" => operator::CHECKS.to_vec(),
        "montecarlo" => montecarlo::CHECKS.to_vec(),
        "all" => [orlicz::CHECKS, symbols::CHECKS, decomp::CHECKS, operator::CHECKS, montecarlo::CHECKS].concat(),
        _ => return None,
    })
}

/// The check registered under `id` in any suite.
pub fn find(id: &str) -> Option<CheckFn> {
    registry("all")?.into_iter().find(|(i, _)| *i == id).map(|(_, f)| f)
}

pub fn run_timed(f: CheckFn, options: &Options) -> (Check, Duration) {
    let start = Instant::now();
    let check = f(options);
    (check, start.elapsed())
}

/// `max(values)` ignoring NaN, or NaN when empty.
pub(crate) fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NAN, f64::max)
}

pub(crate) fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NAN, f64::min)
}

/// Evaluates a fallible check body, turning an error into a failed check.
pub(crate) fn guarded(
    id: &str,
    title: &str,
    tolerance: &str,
    body: impl FnOnce() -> Result<(bool, serde_json::Value), lowsing::Error>,
) -> Check {
    match body() {
        Ok((passed, values)) => Check::new(id, title, passed, tolerance, values),
        Err(e) => Check::failed(id, title, tolerance, e),
    }
}
