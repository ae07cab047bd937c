use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::formula::Specification;

/// Largest input count the brute-force reference accepts.
pub const BRUTE_FORCE_MAX_INPUTS: usize = 20;
const MAX_TOTAL: usize = 26;

/// Word patterns for the six lowest assignment bits.
const LOW_BITS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// `|Sol_σ|` for every input assignment `σ`, indexed by the inputs read as
/// an integer (least significant bit first, inputs in increasing order).
///
/// Evaluates the CNF directly over the full truth table, 64 assignments
/// per word; no SAT solving is involved.
pub fn brute_force_output_counts(spec: &Specification) -> Result<Vec<u64>> {
    let n = spec.num_inputs();
    let m = spec.num_outputs();
    if n > BRUTE_FORCE_MAX_INPUTS || n + m > MAX_TOTAL {
        return Err(Error::Parameter(format!(
            "brute force supports at most {BRUTE_FORCE_MAX_INPUTS} inputs and {MAX_TOTAL} variables, got {n} + {m}"
        )));
    }
    // assignment bit i < m is output i, bit m + j is input j
    let mut position = vec![usize::MAX; spec.cnf.num_vars as usize + 1];
    for (i, v) in spec.output_vec().into_iter().enumerate() {
        position[v.index() as usize] = i;
    }
    for (j, v) in spec.input_vec().into_iter().enumerate() {
        position[v.index() as usize] = m + j;
    }
    let clauses: Vec<Vec<(usize, bool)>> = spec
        .cnf
        .clauses
        .iter()
        .map(|c| {
            c.literals
                .iter()
                .map(|l| (position[l.var.index() as usize], l.negated))
                .collect()
        })
        .collect();

    let total = n + m;
    let words = 1usize << total.saturating_sub(6);
    let valid = if total >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << total)) - 1
    };
    let mut counts = vec![0u64; 1 << n];
    for w in 0..words {
        let lit_mask = |pos: usize, negated: bool| {
            let bits = if pos < 6 {
                LOW_BITS[pos]
            } else if (w >> (pos - 6)) & 1 == 1 {
                u64::MAX
            } else {
                0
            };
            if negated {
                !bits
            } else {
                bits
            }
        };
        let mut sat = valid;
        for clause in &clauses {
            sat &= clause
                .iter()
                .fold(0, |acc, &(p, neg)| acc | lit_mask(p, neg));
            if sat == 0 {
                break;
            }
        }
        if sat == 0 {
            continue;
        }
        if m >= 6 {
            counts[w >> (m - 6)] += u64::from(sat.count_ones());
        } else {
            let group = 1usize << m;
            let group_mask = (1u64 << group) - 1;
            for j in 0..(64 / group).min(1 << n) {
                let sigma = (w * 64 + j * group) >> m;
                counts[sigma] += u64::from(((sat >> (j * group)) & group_mask).count_ones());
            }
        }
    }
    Ok(counts)
}

/// The number of Skolem function vectors: the product over all inputs of
/// the number of consistent outputs, with inputs admitting at most one
/// output contributing a factor of one.
pub fn brute_force_skolem_count(spec: &Specification) -> Result<BigUint> {
    let counts = brute_force_output_counts(spec)?;
    Ok(counts
        .into_iter()
        .filter(|&c| c >= 2)
        .fold(BigUint::from(1u32), |acc, c| acc * c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn factorization_counts() {
        let spec = instances::factorization(5);
        let counts = brute_force_output_counts(&spec).unwrap();
        let multi: Vec<(usize, u64)> = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c >= 2)
            .map(|(i, &c)| (i, c))
            .collect();
        assert_eq!(
            multi,
            vec![
                (12, 2),
                (16, 2),
                (18, 2),
                (20, 2),
                (24, 3),
                (28, 2),
                (30, 3)
            ]
        );
        assert_eq!(
            brute_force_skolem_count(&spec).unwrap(),
            BigUint::from(288u32)
        );
    }

    #[test]
    fn tiny_tables() {
        // one input, one free output: 2 outputs for each of 2 inputs
        let spec = instances::free_outputs(1, 1);
        assert_eq!(brute_force_output_counts(&spec).unwrap(), vec![2, 2]);
        assert_eq!(
            brute_force_skolem_count(&spec).unwrap(),
            BigUint::from(4u32)
        );
        assert_eq!(
            brute_force_skolem_count(&instances::unsat()).unwrap(),
            BigUint::from(1u32)
        );
        assert_eq!(
            brute_force_skolem_count(&instances::xor_chain(3)).unwrap(),
            BigUint::from(1u32)
        );
    }

    #[test]
    fn guard() {
        assert!(brute_force_output_counts(&instances::free_outputs(21, 1)).is_err());
    }
}
