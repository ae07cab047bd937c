use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::RngCore;

use crate::budget::Budget;
use crate::error::{Error, LimitKind, Result};
use crate::formula::{Assignment, Literal, ProjectedFormula, VarId};
use crate::sat::{enumerate_projected_with, Solver};

use super::{uniform_below, SampleResult, Sampler};

/// Per-formula state: one incremental solver plus counts of every prefix
/// seen so far.
struct PrefixCounts {
    solver: Solver,
    next_var: u32,
    projection: Vec<VarId>,
    counts: HashMap<Vec<bool>, BigUint>,
}

impl PrefixCounts {
    fn new(pf: &ProjectedFormula) -> Self {
        let mut solver = Solver::from_cnf(&pf.cnf);
        solver.ensure_vars(pf.cnf.num_vars);
        PrefixCounts {
            solver,
            next_var: pf.cnf.num_vars,
            projection: pf.projection_vec(),
            counts: HashMap::new(),
        }
    }

    /// Exact projected count with the first `prefix.len()` projection
    /// variables fixed to `prefix`.
    fn count(
        &mut self,
        prefix: &[bool],
        max_models: Option<usize>,
        budget: &Budget,
    ) -> Result<BigUint> {
        if let Some(c) = self.counts.get(prefix) {
            return Ok(c.clone());
        }
        self.next_var += 1;
        let act = VarId::from_index(self.next_var).positive();
        let assumptions: Vec<Literal> = self
            .projection
            .iter()
            .zip(prefix)
            .map(|(v, &b)| v.literal(b))
            .collect();
        self.solver.set_deadline(budget.deadline());
        let found = enumerate_projected_with(
            &mut self.solver,
            &self.projection[prefix.len()..],
            &assumptions,
            Some(act),
            max_models,
            budget,
        );
        self.solver.add_clause(&[!act]);
        let found = found?;
        if found.overflow {
            return Err(Error::Limit(LimitKind::Enumeration));
        }
        let c = BigUint::from(found.len());
        self.counts.insert(prefix.to_vec(), c.clone());
        Ok(c)
    }
}

/// Exactly uniform sampling by self-reduction: projection variables are
/// fixed one at a time, each polarity chosen with probability proportional
/// to the exact projected count of the resulting restriction. Meets the
/// almost-uniform contract for every tolerance.
#[derive(Default)]
pub struct SelfReducibleSampler {
    max_models: Option<usize>,
    states: HashMap<u64, PrefixCounts>,
}

impl SelfReducibleSampler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Caps each underlying count at `max` projected models.
    pub fn with_max_models(max: usize) -> Self {
        SelfReducibleSampler {
            max_models: Some(max),
            states: HashMap::new(),
        }
    }
}

impl Sampler for SelfReducibleSampler {
    fn sample(
        &mut self,
        pf: &ProjectedFormula,
        _epsilon_s: f64,
        rng: &mut dyn RngCore,
        budget: &Budget,
    ) -> Result<SampleResult> {
        let before = budget.sat_calls();
        let state = self
            .states
            .entry(pf.fingerprint())
            .or_insert_with(|| PrefixCounts::new(pf));
        let mut prefix = Vec::with_capacity(state.projection.len());
        let mut remaining = state.count(&prefix, self.max_models, budget)?;
        if remaining.is_zero() {
            return Err(Error::Unsatisfiable);
        }
        while prefix.len() < state.projection.len() {
            prefix.push(true);
            let with_true = state.count(&prefix, self.max_models, budget)?;
            let pick_true = uniform_below(&remaining, rng) < with_true;
            if pick_true {
                remaining = with_true;
            } else {
                remaining -= with_true;
                *prefix.last_mut().expect("just pushed") = false;
            }
        }
        let assignment: Assignment = state.projection.iter().copied().zip(prefix).collect();
        Ok(SampleResult {
            assignment,
            calls: budget.sat_calls() - before,
        })
    }

    fn name(&self) -> &'static str {
        "self-reducible"
    }
}
