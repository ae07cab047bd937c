//! Generators for small specifications used in tests, benchmarks and the
//! command-line `gen` tool.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Assignment, Clause, Cnf, Literal, Specification, VarId};

fn vars(range: std::ops::RangeInclusive<u32>) -> BTreeSet<VarId> {
    range.map(VarId::from_index).collect()
}

fn bits_equal(vars: &[VarId], value: u64) -> impl Iterator<Item = Literal> + '_ {
    vars.iter()
        .enumerate()
        .map(move |(i, v)| v.literal((value >> i) & 1 == 1))
}

/// `X = Y0 · Y1` with `2 ≤ Y0 ≤ Y1`, all three `bits` wide.
///
/// Variables `1..=bits` are the product, then `Y0`, then `Y1`, each least
/// significant bit first. Every pair `(a, b)` outside the relation is
/// blocked by one clause; every pair inside forces each product bit.
///
/// # Panics
/// If `bits` is 0 or above 8.
pub fn factorization(bits: u32) -> Specification {
    assert!((1..=8).contains(&bits), "unsupported width");
    let x: Vec<VarId> = (1..=bits).map(VarId::from_index).collect();
    let y0: Vec<VarId> = (bits + 1..=2 * bits).map(VarId::from_index).collect();
    let y1: Vec<VarId> = (2 * bits + 1..=3 * bits).map(VarId::from_index).collect();
    let limit = 1u64 << bits;
    let mut cnf = Cnf::new(3 * bits);
    for a in 0..limit {
        for b in 0..limit {
            // literals falsified exactly when Y0 = a and Y1 = b
            let pair: Vec<Literal> = bits_equal(&y0, a)
                .chain(bits_equal(&y1, b))
                .map(|l| !l)
                .collect();
            if a >= 2 && a <= b && a * b < limit {
                for lit in bits_equal(&x, a * b) {
                    let mut c = pair.clone();
                    c.push(lit);
                    cnf.add_clause(Clause::new(c));
                }
            } else {
                cnf.add_clause(Clause::new(pair));
            }
        }
    }
    Specification::from_parts(
        cnf,
        x.into_iter().collect(),
        y0.into_iter().chain(y1).collect(),
    )
}

/// Outputs `y_i = x_1 ⊕ … ⊕ x_i`: every input has exactly one output, so
/// there is exactly one Skolem function vector.
pub fn xor_chain(n: u32) -> Specification {
    assert!(n >= 1);
    let mut cnf = Cnf::new(2 * n);
    let x = |i: u32| VarId::from_index(i);
    let y = |i: u32| VarId::from_index(n + i);
    cnf.add_literals([y(1).negative(), x(1).positive()]);
    cnf.add_literals([y(1).positive(), x(1).negative()]);
    for i in 2..=n {
        let (p, xi, yi) = (y(i - 1), x(i), y(i));
        cnf.add_literals([yi.negative(), p.positive(), xi.positive()]);
        cnf.add_literals([yi.negative(), p.negative(), xi.negative()]);
        cnf.add_literals([yi.positive(), p.negative(), xi.positive()]);
        cnf.add_literals([yi.positive(), p.positive(), xi.negative()]);
    }
    Specification::from_parts(cnf, vars(1..=n), vars(n + 1..=2 * n))
}

/// One input, one output, and the contradiction `y ∧ ¬y`.
pub fn unsat() -> Specification {
    let mut cnf = Cnf::new(2);
    cnf.add_literals([VarId::from_index(2).positive()]);
    cnf.add_literals([VarId::from_index(2).negative()]);
    Specification::from_parts(cnf, vars(1..=1), vars(2..=2))
}

/// `n` inputs and `m` unconstrained outputs.
pub fn free_outputs(n: u32, m: u32) -> Specification {
    Specification::from_parts(Cnf::new(n + m), vars(1..=n), vars(n + 1..=n + m))
}

/// `n` inputs, two outputs and the single clause `y1 ∨ x1 ∨ x2`: every
/// input has two or more outputs, so there are `2^n` of them.
pub fn wide(n: u32) -> Specification {
    assert!(n >= 2);
    let mut cnf = Cnf::new(n + 2);
    cnf.add_literals([
        VarId::from_index(n + 1).positive(),
        VarId::from_index(1).positive(),
        VarId::from_index(2).positive(),
    ]);
    Specification::from_parts(cnf, vars(1..=n), vars(n + 1..=n + 2))
}

/// A random `width`-CNF over `n` inputs and `m` outputs with `clauses`
/// clauses. Each clause draws distinct variables uniformly and signs them
/// by coin flip.
pub fn random_spec(n: u32, m: u32, clauses: usize, width: usize, seed: u64) -> Specification {
    let total = n + m;
    assert!(m >= 1 && width >= 1 && width <= total as usize);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cnf = Cnf::new(total);
    for _ in 0..clauses {
        let lits = sample(&mut rng, total as usize, width)
            .into_iter()
            .map(|i| VarId::from_index(i as u32 + 1).literal(rng.random_bool(0.5)))
            .collect();
        cnf.add_clause(Clause::new(lits));
    }
    Specification::from_parts(cnf, vars(1..=n), vars(n + 1..=total))
}

/// The inputs of `sigma` read as an integer, least significant bit first.
pub fn input_value(spec: &Specification, sigma: &Assignment) -> u64 {
    sigma.to_uint(&spec.input_vec())
}

/// The input assignment whose integer reading is `value`.
pub fn input_assignment(spec: &Specification, value: u64) -> Assignment {
    Assignment::from_uint(&spec.input_vec(), value)
}

/// Small named specifications with known Skolem counts, for end-to-end
/// checks.
pub fn panel() -> Vec<(String, Specification)> {
    let mut specs = vec![
        ("factorization5".to_string(), factorization(5)),
        ("xor_chain4".to_string(), xor_chain(4)),
        ("unsat".to_string(), unsat()),
        ("free_3_2".to_string(), free_outputs(3, 2)),
        ("wide4".to_string(), wide(4)),
        ("factorization4".to_string(), factorization(4)),
    ];
    for (i, &(n, m, k, seed)) in [
        (4, 3, 6, 11),
        (5, 3, 8, 12),
        (3, 4, 6, 13),
        (5, 4, 10, 14),
        (6, 3, 9, 15),
    ]
    .iter()
    .enumerate()
    {
        specs.push((format!("random{i}"), random_spec(n, m, k, 3, seed)));
    }
    specs
}
