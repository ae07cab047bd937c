use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::budget::Budget;
use crate::count::{count_g, CountResult, Counter, ExactCounter, HashCounter};
use crate::error::{Error, Result};
use crate::formula::Specification;
use crate::sample::{HashSampler, Sampler, SelfReducibleSampler};
use crate::sat::{SatStatus, Solver};
use crate::transform::{build_g, cofactor_on_outputs};

use super::{derive_params, LogBase, LogCount, Outcome, ParamSet, RunStats, StoppingRule};

/// Which per-input counting tolerance the final error check uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AbortCheck {
    /// The largest tolerance any per-input count actually carried (zero
    /// when every count was exact).
    #[default]
    Effective,
    /// The nominal per-input tolerance `4√2 − 1`, whatever the oracle did.
    Nominal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkolemConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub log_base: LogBase,
    pub abort_check: AbortCheck,
}

impl Default for SkolemConfig {
    fn default() -> Self {
        SkolemConfig {
            epsilon: 0.8,
            delta: 0.4,
            seed: 0,
            log_base: LogBase::E,
            abort_check: AbortCheck::Effective,
        }
    }
}

/// The counting and sampling oracles a run draws on.
pub struct Oracles {
    pub counter: Box<dyn Counter>,
    pub sampler: Box<dyn Sampler>,
}

impl Oracles {
    /// Enumeration-backed counting and exactly uniform sampling.
    pub fn exact() -> Self {
        Oracles {
            counter: Box::new(ExactCounter::new()),
            sampler: Box::new(SelfReducibleSampler::new()),
        }
    }

    /// Hashing-based counting and sampling.
    pub fn hashing() -> Self {
        Oracles {
            counter: Box::new(HashCounter::new()),
            sampler: Box::new(HashSampler::new()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkolemRun {
    pub outcome: Outcome,
    pub stats: RunStats,
    pub params: ParamSet,
    /// Estimate of the number of inputs with two or more outputs.
    pub g_count: Option<CountResult>,
}

struct Tally<'a> {
    budget: &'a Budget,
    start: Instant,
    sat_before: u64,
    stats: RunStats,
}

impl Tally<'_> {
    fn finish(mut self) -> RunStats {
        self.stats.sat_calls = self.budget.sat_calls() - self.sat_before;
        self.stats.wall_time_s = self.start.elapsed().as_secs_f64();
        self.stats
    }
}

/// Estimates the logarithm of the number of Skolem function vectors of
/// `spec` to within `ε` (relative) with probability at least `1-δ`.
///
/// Inputs with two or more outputs are sampled from the doubled formula;
/// each sample's normalized log-count `log2|Sol_σ|/m` feeds the stopping
/// rule, whose mean estimate is scaled by `m` and by an estimate of the
/// number of such inputs. Resource limits end the run with
/// [`Outcome::Limit`]; other oracle failures are returned as errors.
pub fn skolemfc(
    spec: &Specification,
    config: &SkolemConfig,
    oracles: &mut Oracles,
    budget: &Budget,
) -> Result<SkolemRun> {
    let m = spec.num_outputs();
    let params = derive_params(config.epsilon, config.delta, m)?;
    let mut tally = Tally {
        budget,
        start: Instant::now(),
        sat_before: budget.sat_calls(),
        stats: RunStats::default(),
    };
    let mut g_count = None;
    let result = run(
        spec,
        config,
        &params,
        oracles,
        budget,
        &mut tally.stats,
        &mut g_count,
    );
    let outcome = match result {
        Ok(outcome) => outcome,
        Err(Error::Limit(kind)) => Outcome::Limit(kind),
        Err(e) => return Err(e),
    };
    if let Outcome::Abort { .. } = outcome {
        tally.stats.aborted =
            Some("per-input counting error exceeds a tenth of the estimate".into());
    }
    Ok(SkolemRun {
        outcome,
        stats: tally.finish(),
        params,
        g_count,
    })
}

fn run(
    spec: &Specification,
    config: &SkolemConfig,
    params: &ParamSet,
    oracles: &mut Oracles,
    budget: &Budget,
    stats: &mut RunStats,
    g_count: &mut Option<CountResult>,
) -> Result<Outcome> {
    let m = spec.num_outputs() as f64;
    let g = build_g(spec);

    budget.charge()?;
    let mut solver = Solver::from_cnf(g.cnf());
    solver.ensure_vars(g.cnf().num_vars);
    solver.set_deadline(budget.deadline());
    if solver.solve()? == SatStatus::Unsat {
        return Ok(Outcome::Estimate(LogCount::zero(config.log_base)));
    }
    drop(solver);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let counted = count_g(
        &g,
        oracles.counter.as_mut(),
        params.eps_g,
        params.delta_g,
        &mut rng,
        budget,
    )?;
    stats.count_calls += 1;
    let g_est = counted.to_f64();
    *g_count = Some(counted);

    let mut rule = StoppingRule::new(params.s_threshold);
    let mut eps_seen: f64 = 0.0;
    while !rule.is_done() {
        budget.check_deadline()?;
        let sigma = oracles
            .sampler
            .sample(&g.formula, params.eps_s, &mut rng, budget)?
            .assignment;
        stats.sample_calls += 1;
        let cof = cofactor_on_outputs(spec, &sigma)?;
        let counted =
            oracles
                .counter
                .count(&cof, params.eps_c, params.delta_c, &mut rng, budget)?;
        stats.count_calls += 1;
        eps_seen = eps_seen.max(counted.epsilon);
        let raw = counted.log2() / m;
        let c = raw.clamp(1.0 / m, 1.0);
        if c != raw {
            stats.clamp_events += 1;
        }
        rule.push(c)?;
        stats.t = rule.t();
        stats.x = rule.x();
    }

    let est_log2 = rule.estimate() * m * g_est;
    let estimate = LogCount::from_log2(est_log2, config.log_base);
    let eps_check = match config.abort_check {
        AbortCheck::Effective => eps_seen,
        AbortCheck::Nominal => params.eps_c,
    };
    if g_est * (1.0 + eps_check).log2() > 0.1 * est_log2 {
        return Ok(Outcome::Abort { estimate });
    }
    Ok(Outcome::Estimate(estimate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Limits;
    use crate::error::LimitKind;
    use crate::instances;

    #[test]
    fn factorization_estimate_and_call_shape() {
        let spec = instances::factorization(5);
        let truth = 288f64.ln();
        let mut hits = 0;
        for seed in 0..20 {
            let config = SkolemConfig {
                seed,
                ..SkolemConfig::default()
            };
            let run =
                skolemfc(&spec, &config, &mut Oracles::exact(), &Budget::unlimited()).unwrap();
            let est = run
                .outcome
                .estimate()
                .expect("exact oracles never abort")
                .value;
            if (est - truth).abs() <= 0.8 * truth {
                hits += 1;
            }
            assert!(run.stats.t as f64 <= (10.0 * run.params.s_threshold).ceil());
            assert_eq!(run.stats.count_calls, run.stats.t + 1);
            assert_eq!(run.stats.sample_calls, run.stats.t);
            assert_eq!(run.stats.clamp_events, 0);
        }
        assert!(hits >= 15, "{hits}");
    }

    #[test]
    fn unique_function_is_zero() {
        let spec = instances::xor_chain(4);
        let run = skolemfc(
            &spec,
            &SkolemConfig::default(),
            &mut Oracles::exact(),
            &Budget::unlimited(),
        )
        .unwrap();
        let est = run.outcome.estimate().unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(run.stats.t, 0);
        assert_eq!(run.stats.sat_calls, 1);
    }

    #[test]
    fn nominal_check_aborts_small_instances() {
        let config = SkolemConfig {
            abort_check: AbortCheck::Nominal,
            ..SkolemConfig::default()
        };
        let run = skolemfc(
            &instances::factorization(5),
            &config,
            &mut Oracles::exact(),
            &Budget::unlimited(),
        )
        .unwrap();
        assert!(matches!(run.outcome, Outcome::Abort { .. }));
        assert!(run.stats.aborted.is_some());
    }

    #[test]
    fn sat_call_budget_ends_run() {
        let budget = Budget::new(Limits {
            max_sat_calls: Some(5),
            timeout: None,
        });
        let run = skolemfc(
            &instances::factorization(5),
            &SkolemConfig::default(),
            &mut Oracles::exact(),
            &budget,
        )
        .unwrap();
        assert_eq!(run.outcome, Outcome::Limit(LimitKind::SatCalls));
        assert_eq!(run.stats.sat_calls, 5);
    }

    #[test]
    fn rejects_bad_parameters() {
        let config = SkolemConfig {
            epsilon: 3.0,
            ..SkolemConfig::default()
        };
        assert!(skolemfc(
            &instances::factorization(5),
            &config,
            &mut Oracles::exact(),
            &Budget::unlimited()
        )
        .is_err());
    }
}
