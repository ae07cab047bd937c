//! Projected model counting oracles.
//!
//! Two implementations share the [`Counter`] contract: [`ExactCounter`]
//! enumerates projected models, and [`HashCounter`] estimates counts with
//! random XOR constraints. Given `(ε, δ)`, a counter returns `c` with
//! `Pr[|Sol|/(1+ε) ≤ c ≤ (1+ε)|Sol|] ≥ 1-δ`.

mod exact;
mod external;
mod hash;
pub(crate) mod xor;

pub use exact::ExactCounter;
pub use external::ExternalCounter;
pub use hash::{approxmc_rounds, approxmc_threshold, HashCounter};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::formula::ProjectedFormula;
use crate::transform::DoubledFormula;

#[derive(Debug, Clone, PartialEq)]
pub struct CountResult {
    pub count: BigUint,
    /// True when `count` is the exact projected count.
    pub exact: bool,
    /// Tolerance actually guaranteed; 0 for exact results.
    pub epsilon: f64,
    /// Failure probability actually guaranteed; 0 for exact results.
    pub delta: f64,
    /// SAT-engine calls consumed.
    pub calls: u64,
}

impl CountResult {
    pub fn exact(count: BigUint, calls: u64) -> Self {
        CountResult {
            count,
            exact: true,
            epsilon: 0.0,
            delta: 0.0,
            calls,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.count.is_zero()
    }

    pub fn log2(&self) -> f64 {
        log2_big(&self.count)
    }

    pub fn to_f64(&self) -> f64 {
        self.count.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// `log2(n)` for arbitrarily large `n`, from the bit length plus the
/// leading 64 bits. `-inf` for zero.
pub fn log2_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return n
            .to_u64()
            .expect("fits in 64 bits")
            .to_f64()
            .expect("finite")
            .log2();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().expect("64 leading bits") as f64;
    top.log2() + shift as f64
}

/// A projected model counter. `epsilon`/`delta` are the requested
/// guarantees; randomized implementations draw from `rng`.
pub trait Counter {
    fn count(
        &mut self,
        pf: &ProjectedFormula,
        epsilon: f64,
        delta: f64,
        rng: &mut dyn RngCore,
        budget: &Budget,
    ) -> Result<CountResult>;

    fn name(&self) -> &'static str;
}

pub(crate) fn check_tolerances(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Parameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!(
            "delta must be in (0,1), got {delta}"
        )));
    }
    Ok(())
}

/// `|Sol(pf)↓projection|` by enumeration.
pub fn exact_count(pf: &ProjectedFormula, budget: &Budget) -> Result<CountResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    ExactCounter::new().count(pf, 1.0, 0.5, &mut rng, budget)
}

/// An `(ε, δ)` estimate of the projected count from the hashing counter.
pub fn approx_count(
    pf: &ProjectedFormula,
    epsilon: f64,
    delta: f64,
    seed: u64,
    budget: &Budget,
) -> Result<CountResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    HashCounter::new().count(pf, epsilon, delta, &mut rng, budget)
}

/// Counts the doubled formula on its input projection.
pub fn count_g(
    g: &DoubledFormula,
    counter: &mut dyn Counter,
    epsilon_g: f64,
    delta_g: f64,
    rng: &mut dyn RngCore,
    budget: &Budget,
) -> Result<CountResult> {
    counter.count(&g.formula, epsilon_g, delta_g, rng, budget)
}
