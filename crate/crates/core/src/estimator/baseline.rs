use std::time::Instant;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::budget::Budget;
use crate::count::{log2_big, Counter, ExactCounter};
use crate::error::{Error, LimitKind, Result};
use crate::formula::{Assignment, Specification};
use crate::sat::enumerate_projected;
use crate::transform::{build_g, cofactor_on_outputs};

use super::{LogBase, LogCount, Outcome, RunStats};

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRun {
    pub outcome: Outcome,
    /// Every input with two or more outputs, with its output count.
    pub per_input: Vec<(Assignment, BigUint)>,
    pub stats: RunStats,
}

/// Exact Skolem function count by enumerating the inputs with two or more
/// outputs and counting each cofactor exactly. `max_inputs` caps the
/// enumeration; exceeding it ends the run with
/// [`LimitKind::Enumeration`].
pub fn baseline(
    spec: &Specification,
    max_inputs: Option<usize>,
    log_base: LogBase,
    budget: &Budget,
) -> Result<BaselineRun> {
    let start = Instant::now();
    let before = budget.sat_calls();
    let mut stats = RunStats::default();
    let mut per_input = Vec::new();
    let outcome = match run(
        spec,
        max_inputs,
        log_base,
        budget,
        &mut stats,
        &mut per_input,
    ) {
        Ok(o) => o,
        Err(Error::Limit(kind)) => Outcome::Limit(kind),
        Err(e) => return Err(e),
    };
    stats.sat_calls = budget.sat_calls() - before;
    stats.wall_time_s = start.elapsed().as_secs_f64();
    Ok(BaselineRun {
        outcome,
        per_input,
        stats,
    })
}

fn run(
    spec: &Specification,
    max_inputs: Option<usize>,
    log_base: LogBase,
    budget: &Budget,
    stats: &mut RunStats,
    per_input: &mut Vec<(Assignment, BigUint)>,
) -> Result<Outcome> {
    let g = build_g(spec);
    let inputs = enumerate_projected(&g.formula, max_inputs, budget)?;
    if inputs.overflow {
        return Err(Error::Limit(LimitKind::Enumeration));
    }
    let mut counter = ExactCounter::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut log2_sum = 0.0;
    let mut product = BigUint::from(1u32);
    for sigma in inputs.models {
        let cof = cofactor_on_outputs(spec, &sigma)?;
        let n = counter.count(&cof, 1.0, 0.5, &mut rng, budget)?.count;
        stats.count_calls += 1;
        log2_sum += log2_big(&n);
        product *= &n;
        per_input.push((sigma, n));
    }
    Ok(Outcome::Estimate(LogCount {
        value: log_base.from_log2(log2_sum),
        base: log_base,
        exact: Some(product),
    }))
}
