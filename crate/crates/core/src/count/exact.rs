use std::collections::HashMap;

use num_bigint::BigUint;
use rand::RngCore;

use crate::budget::Budget;
use crate::error::{Error, LimitKind, Result};
use crate::formula::ProjectedFormula;
use crate::sat::enumerate_projected;

use super::{CountResult, Counter};

/// Exact projected counting by blocking-clause enumeration. Satisfies
/// every `(ε, δ)` contract. Results are memoized per formula.
#[derive(Debug, Default)]
pub struct ExactCounter {
    max_models: Option<usize>,
    cache: HashMap<u64, BigUint>,
}

impl ExactCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fails with [`LimitKind::Enumeration`] when more than `max` projected
    /// models exist.
    pub fn with_max_models(max: usize) -> Self {
        ExactCounter {
            max_models: Some(max),
            cache: HashMap::new(),
        }
    }
}

impl Counter for ExactCounter {
    fn count(
        &mut self,
        pf: &ProjectedFormula,
        _epsilon: f64,
        _delta: f64,
        _rng: &mut dyn RngCore,
        budget: &Budget,
    ) -> Result<CountResult> {
        let key = pf.fingerprint();
        if let Some(n) = self.cache.get(&key) {
            return Ok(CountResult::exact(n.clone(), 0));
        }
        let before = budget.sat_calls();
        let models = enumerate_projected(pf, self.max_models, budget)?;
        if models.overflow {
            return Err(Error::Limit(LimitKind::Enumeration));
        }
        let n = BigUint::from(models.len());
        self.cache.insert(key, n.clone());
        Ok(CountResult::exact(n, budget.sat_calls() - before))
    }

    fn name(&self) -> &'static str {
        "exact"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::exact_count;
    use crate::formula::{Cnf, Literal, VarId};

    fn or12(projection: &[u32]) -> ProjectedFormula {
        let mut cnf = Cnf::new(2);
        cnf.add_literals([1, 2].map(|x| Literal::from_dimacs(x).unwrap()));
        ProjectedFormula::new(
            cnf,
            projection.iter().map(|&i| VarId::from_index(i)).collect(),
        )
    }

    #[test]
    fn or_counts() {
        let b = Budget::unlimited();
        let r = exact_count(&or12(&[1, 2]), &b).unwrap();
        assert_eq!(r.count, BigUint::from(3u32));
        assert!(r.exact);
        assert_eq!((r.epsilon, r.delta), (0.0, 0.0));
        // the last blocking clause is refuted without a fourth solve
        assert_eq!(r.calls, 3);
    }

    #[test]
    fn unsat_is_zero() {
        let mut cnf = Cnf::new(1);
        cnf.add_literals([Literal::from_dimacs(1).unwrap()]);
        cnf.add_literals([Literal::from_dimacs(-1).unwrap()]);
        let pf = ProjectedFormula::new(cnf, [VarId::from_index(1)].into());
        assert!(exact_count(&pf, &Budget::unlimited()).unwrap().is_zero());
    }

    #[test]
    fn cap_and_cache() {
        let b = Budget::unlimited();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
        let mut capped = ExactCounter::with_max_models(2);
        let err = capped
            .count(&or12(&[1, 2]), 1.0, 0.5, &mut rng, &b)
            .unwrap_err();
        assert!(matches!(err, Error::Limit(LimitKind::Enumeration)));
        let mut c = ExactCounter::new();
        c.count(&or12(&[1]), 1.0, 0.5, &mut rng, &b).unwrap();
        let again = c.count(&or12(&[1]), 1.0, 0.5, &mut rng, &b).unwrap();
        assert_eq!(again.calls, 0);
        assert_eq!(again.count, BigUint::from(2u32));
    }
}
