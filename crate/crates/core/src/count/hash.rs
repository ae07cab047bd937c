use std::collections::HashMap;

use num_bigint::BigUint;
use rand::RngCore;

use crate::budget::Budget;
use crate::error::Result;
use crate::formula::ProjectedFormula;
use crate::sat::enumerate_projected;

use super::xor::{HashedSolver, XorConstraint};
use super::{check_tolerances, CountResult, Counter};

/// Cell-size threshold for tolerance `epsilon`.
pub fn approxmc_threshold(epsilon: f64) -> usize {
    let t = 1.0 + 9.84 * (1.0 + epsilon / (1.0 + epsilon)) * (1.0 + 1.0 / epsilon).powi(2);
    t.ceil() as usize
}

/// Number of independent rounds whose median achieves confidence `1-delta`.
pub fn approxmc_rounds(delta: f64) -> usize {
    (17.0 * (3.0 / delta).log2()).ceil().max(1.0) as usize
}

/// Hashing-based `(ε, δ)` projected counter.
///
/// Counts below the cell threshold are found exactly by enumeration.
/// Otherwise each round partitions the projected solution space with random
/// parity constraints (density 1/2), finds the fewest constraints that leave
/// a cell smaller than the threshold, and scales the cell size by
/// `2^constraints`. The median over rounds is returned.
#[derive(Debug, Default)]
pub struct HashCounter {
    small_counts: HashMap<u64, BigUint>,
}

impl HashCounter {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Smallest `k ≥ 1` with `cell(k) < thresh`, probing near `hint`. Returns
/// `(k, cell size)`.
fn find_cell(
    hs: &mut HashedSolver,
    thresh: usize,
    hint: Option<usize>,
    budget: &Budget,
) -> Result<(usize, usize)> {
    let max_k = hs.num_constraints();
    let mut probe = |k: usize| -> Result<Option<usize>> {
        let cell = hs.cell(k, Some(thresh - 1), budget)?;
        Ok((!cell.overflow).then_some(cell.len()))
    };
    match hint {
        Some(h) => {
            let mut k = h.clamp(1, max_k);
            match probe(k)? {
                Some(mut size) => {
                    while k > 1 {
                        match probe(k - 1)? {
                            Some(s) => {
                                k -= 1;
                                size = s;
                            }
                            None => break,
                        }
                    }
                    Ok((k, size))
                }
                None => {
                    while k < max_k {
                        k += 1;
                        if let Some(size) = probe(k)? {
                            return Ok((k, size));
                        }
                    }
                    // dependent constraints never produced a small cell
                    Ok((max_k, thresh))
                }
            }
        }
        None => {
            // cell(lo) is large, cell(hi) is small (if any k works)
            let mut lo = 0;
            let mut hi = max_k;
            let mut hi_size = None;
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                match probe(mid)? {
                    Some(size) => {
                        hi = mid;
                        hi_size = Some(size);
                    }
                    None => lo = mid,
                }
            }
            let size = match hi_size {
                Some(s) => s,
                None => probe(hi)?.unwrap_or(thresh),
            };
            Ok((hi, size))
        }
    }
}

impl Counter for HashCounter {
    fn count(
        &mut self,
        pf: &ProjectedFormula,
        epsilon: f64,
        delta: f64,
        rng: &mut dyn RngCore,
        budget: &Budget,
    ) -> Result<CountResult> {
        check_tolerances(epsilon, delta)?;
        let key = pf.fingerprint();
        if let Some(n) = self.small_counts.get(&key) {
            return Ok(CountResult::exact(n.clone(), 0));
        }
        let before = budget.sat_calls();
        let thresh = approxmc_threshold(epsilon);
        let small = enumerate_projected(pf, Some(thresh - 1), budget)?;
        if !small.overflow {
            let n = BigUint::from(small.len());
            self.small_counts.insert(key, n.clone());
            return Ok(CountResult::exact(n, budget.sat_calls() - before));
        }

        let projection = pf.projection_vec();
        let rounds = approxmc_rounds(delta);
        let mut estimates = Vec::with_capacity(rounds);
        let mut hint = None;
        for _ in 0..rounds {
            let xors: Vec<XorConstraint> = (0..projection.len())
                .map(|_| XorConstraint::random(&projection, rng))
                .collect();
            let mut hs = HashedSolver::new(pf, &xors, budget);
            let (k, size) = find_cell(&mut hs, thresh, hint, budget)?;
            hint = Some(k);
            estimates.push(BigUint::from(size) << k);
        }
        estimates.sort();
        let median = estimates.swap_remove((estimates.len() - 1) / 2);
        Ok(CountResult {
            count: median,
            exact: false,
            epsilon,
            delta,
            calls: budget.sat_calls() - before,
        })
    }

    fn name(&self) -> &'static str {
        "hash"
    }
}
