use std::collections::HashMap;

use rand::{Rng, RngCore};

use crate::budget::Budget;
use crate::count::xor::{HashedSolver, XorConstraint};
use crate::count::{Counter, HashCounter};
use crate::error::{Error, Result};
use crate::formula::{Assignment, ProjectedFormula};
use crate::sat::enumerate_projected;

use super::{uniform_index, SampleResult, Sampler};

enum Plan {
    /// Few enough models to list; sampled directly.
    Listed(Vec<Assignment>),
    /// `k` parity constraints; `mu_max` bounds the expected cell size.
    Hashed { k: usize, mu_max: f64 },
}

/// Almost-uniform sampling by random parity constraints.
///
/// The number of constraints `k` is fixed per formula from an approximate
/// count so that cells hold about `target_cell` models. A draw picks a
/// random cell, rejects it if it exceeds `hi`, accepts it with probability
/// `|cell| / hi` and returns a uniform member. Every model is then emitted
/// with probability proportional to `2^-k · Pr[|cell| ≤ hi | model ∈ cell]`;
/// choosing `hi = 1 + μ + sqrt(μ/β)` with `β = ε/(1+ε)` bounds the
/// conditional overflow probability by `β` (Chebyshev, using 3-wise
/// independence of the hash family), which keeps every probability within a
/// `(1+ε)` factor of uniform.
pub struct HashSampler {
    target_cell: usize,
    max_tries: usize,
    plans: HashMap<u64, Plan>,
}

impl Default for HashSampler {
    fn default() -> Self {
        HashSampler {
            target_cell: 32,
            max_tries: 10_000,
            plans: HashMap::new(),
        }
    }
}

impl HashSampler {
    pub fn new() -> Self {
        Self::default()
    }

    fn plan(&self, pf: &ProjectedFormula, rng: &mut dyn RngCore, budget: &Budget) -> Result<Plan> {
        let listed = enumerate_projected(pf, Some(4 * self.target_cell), budget)?;
        if !listed.overflow {
            if listed.is_empty() {
                return Err(Error::Unsatisfiable);
            }
            return Ok(Plan::Listed(listed.models));
        }
        let (eps, delta) = (0.8, 0.2);
        let estimate = HashCounter::new().count(pf, eps, delta, rng, budget)?;
        let log2 = estimate.log2();
        let k = (log2 - (self.target_cell as f64).log2()).ceil().max(1.0) as usize;
        let k = k.min(pf.projection.len());
        let mu_max = (log2 - k as f64).exp2() * (1.0 + eps);
        Ok(Plan::Hashed { k, mu_max })
    }
}

/// Largest cell size accepted for tolerance `epsilon`.
pub(crate) fn cell_cap(mu_max: f64, epsilon: f64) -> usize {
    let beta = epsilon / (1.0 + epsilon);
    (1.0 + mu_max + (mu_max / beta).sqrt()).ceil() as usize
}

impl Sampler for HashSampler {
    fn sample(
        &mut self,
        pf: &ProjectedFormula,
        epsilon_s: f64,
        rng: &mut dyn RngCore,
        budget: &Budget,
    ) -> Result<SampleResult> {
        let before = budget.sat_calls();
        let key = pf.fingerprint();
        if !self.plans.contains_key(&key) {
            let plan = self.plan(pf, rng, budget)?;
            self.plans.insert(key, plan);
        }
        let assignment = match &self.plans[&key] {
            Plan::Listed(models) => models[uniform_index(models.len(), rng)].clone(),
            &Plan::Hashed { k, mu_max } => {
                if epsilon_s.is_nan() || epsilon_s <= 0.0 {
                    return Err(Error::Parameter(
                        "the hashing sampler needs a positive tolerance".into(),
                    ));
                }
                let hi = cell_cap(mu_max, epsilon_s);
                let projection = pf.projection_vec();
                let mut picked = None;
                for _ in 0..self.max_tries {
                    let xors: Vec<XorConstraint> = (0..k)
                        .map(|_| XorConstraint::random(&projection, rng))
                        .collect();
                    let mut hs = HashedSolver::new(pf, &xors, budget);
                    let cell = hs.cell(k, Some(hi), budget)?;
                    if cell.overflow || cell.is_empty() {
                        continue;
                    }
                    if rng.random_range(0..hi) < cell.len() {
                        let i = uniform_index(cell.len(), rng);
                        picked = Some(cell.models[i].clone());
                        break;
                    }
                }
                picked.ok_or(Error::SamplerExhausted(self.max_tries))?
            }
        };
        Ok(SampleResult {
            assignment,
            calls: budget.sat_calls() - before,
        })
    }

    fn name(&self) -> &'static str {
        "hash"
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::formula::{Cnf, Literal, VarId};

    #[test]
    fn cap_grows_as_tolerance_shrinks() {
        assert!(cell_cap(57.6, 0.16) > cell_cap(57.6, 1.0));
        assert_eq!(cell_cap(57.6, 0.16), 80);
    }

    #[test]
    fn hashed_plan_stays_in_support() {
        // 9 free variables with x1 forced: 256 models, above the listing cap
        let mut cnf = Cnf::new(9);
        cnf.add_literals([Literal::from_dimacs(1).unwrap()]);
        let pf = ProjectedFormula::new(cnf, (1..=9).map(VarId::from_index).collect());
        let mut s = HashSampler::new();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = Budget::unlimited();
        let mut freq: BTreeMap<u64, usize> = BTreeMap::new();
        for _ in 0..400 {
            let a = s.sample(&pf, 0.5, &mut rng, &b).unwrap().assignment;
            assert!(pf.cnf.is_satisfied_by(&a));
            *freq.entry(a.to_uint(&pf.projection_vec())).or_default() += 1;
        }
        assert!(matches!(s.plans.values().next(), Some(Plan::Hashed { .. })));
        // 400 draws over 256 models: most models appear, none dominates
        assert!(freq.len() > 150, "{}", freq.len());
        assert!(freq.values().all(|&c| c < 12));
    }

    #[test]
    fn listed_plan_and_unsat() {
        let pf = ProjectedFormula::new(Cnf::new(2), (1..=2).map(VarId::from_index).collect());
        let mut s = HashSampler::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = Budget::unlimited();
        assert_eq!(
            s.sample(&pf, 0.1, &mut rng, &b).unwrap().assignment.len(),
            2
        );
        let mut cnf = Cnf::new(1);
        cnf.add_literals([Literal::from_dimacs(1).unwrap()]);
        cnf.add_literals([Literal::from_dimacs(-1).unwrap()]);
        let unsat = ProjectedFormula::new(cnf, [VarId::from_index(1)].into());
        assert!(matches!(
            s.sample(&unsat, 0.1, &mut rng, &b),
            Err(Error::Unsatisfiable)
        ));
    }
}
