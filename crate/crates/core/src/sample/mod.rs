//! Uniform and almost-uniform samplers over projected models.
//!
//! A sampler with tolerance `ε` draws each `y ∈ Sol(F)↓S` with probability
//! between `1/((1+ε)|Sol(F)↓S|)` and `(1+ε)/|Sol(F)↓S|`.

mod external;
mod hash;
mod self_reducible;

pub use external::ExternalSampler;
pub use hash::HashSampler;
pub use self_reducible::SelfReducibleSampler;

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::budget::Budget;
use crate::error::Result;
use crate::formula::{Assignment, ProjectedFormula};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleResult {
    /// Total over the projection set.
    pub assignment: Assignment,
    /// SAT-engine calls consumed.
    pub calls: u64,
}

pub trait Sampler {
    /// Draws one projected model. Fails with [`crate::Error::Unsatisfiable`]
    /// when there is none.
    fn sample(
        &mut self,
        pf: &ProjectedFormula,
        epsilon_s: f64,
        rng: &mut dyn RngCore,
        budget: &Budget,
    ) -> Result<SampleResult>;

    fn name(&self) -> &'static str;
}

/// One draw from the default (exactly uniform) sampler.
pub fn sample(
    pf: &ProjectedFormula,
    epsilon_s: f64,
    seed: u64,
    budget: &Budget,
) -> Result<SampleResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SelfReducibleSampler::new().sample(pf, epsilon_s, &mut rng, budget)
}

/// Uniform integer in `[0, bound)` by rejection on the bit length.
///
/// # Panics
/// If `bound` is zero.
pub(crate) fn uniform_below(bound: &BigUint, rng: &mut dyn RngCore) -> BigUint {
    assert!(bound.bits() > 0, "empty range");
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top_mask = if bits.is_multiple_of(32) {
        u32::MAX
    } else {
        (1u32 << (bits % 32)) - 1
    };
    loop {
        let mut digits: Vec<u32> = (0..words).map(|_| rng.next_u32()).collect();
        *digits.last_mut().expect("at least one word") &= top_mask;
        let candidate = BigUint::from_slice(&digits);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// Uniform index in `[0, n)`.
pub(crate) fn uniform_index(n: usize, rng: &mut dyn RngCore) -> usize {
    use rand::Rng;
    rng.random_range(0..n)
}
