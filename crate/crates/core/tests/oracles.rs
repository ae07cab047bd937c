//! Statistical and contract checks for the counting and sampling oracles.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use skolemfc::count::{count_g, exact_count, ExactCounter, HashCounter};
use skolemfc::instances::{self, input_value};
use skolemfc::sat::enumerate_projected;
use skolemfc::{
    build_g, Assignment, Budget, Clause, Counter, Error, HashSampler, ProjectedFormula, Sampler,
    SelfReducibleSampler, VarId,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn frequencies(
    sampler: &mut dyn Sampler,
    pf: &ProjectedFormula,
    draws: usize,
    seed: u64,
) -> BTreeMap<Assignment, usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = Budget::unlimited();
    let mut freq = BTreeMap::new();
    for _ in 0..draws {
        let a = sampler.sample(pf, 0.0, &mut rng, &b).unwrap().assignment;
        *freq.entry(a).or_insert(0) += 1;
    }
    freq
}

#[test]
fn factorization_inputs_sampled_uniformly() {
    let spec = instances::factorization(5);
    let g = build_g(&spec);
    let draws = 100_000;
    let p = 1.0 / 7.0;
    let band = 3.0 * (draws as f64 * p * (1.0 - p)).sqrt();
    for sampler in [
        &mut SelfReducibleSampler::new() as &mut dyn Sampler,
        &mut HashSampler::new(),
    ] {
        let freq = frequencies(sampler, &g.formula, draws, 17);
        let drawn: BTreeSet<u64> = freq.keys().map(|a| input_value(&spec, a)).collect();
        assert_eq!(drawn, [12, 16, 18, 20, 24, 28, 30].into(), "{}", sampler.name());
        for (a, &c) in &freq {
            assert!(
                (c as f64 - draws as f64 * p).abs() <= band,
                "{}: {} drawn {c} times",
                sampler.name(),
                input_value(&spec, a)
            );
        }
    }
}

#[test]
fn self_reducible_sampler_passes_chi_square() {
    // 11 variables projected on 7
    let spec = instances::random_spec(7, 4, 9, 3, 5);
    let pf = ProjectedFormula::new(spec.cnf.clone(), spec.inputs.clone());
    let support: BTreeSet<Assignment> = enumerate_projected(&pf, None, &Budget::unlimited())
        .unwrap()
        .models
        .into_iter()
        .collect();
    assert!(support.len() > 20, "{}", support.len());
    let draws = 100_000;
    let expected = draws as f64 / support.len() as f64;
    let dist = ChiSquared::new((support.len() - 1) as f64).unwrap();
    let mut p_values = Vec::new();
    let mut sampler = SelfReducibleSampler::new();
    for seed in 0..5 {
        let freq = frequencies(&mut sampler, &pf, draws, seed);
        assert!(freq.keys().all(|a| support.contains(a)));
        let chi2: f64 = support
            .iter()
            .map(|a| {
                let o = *freq.get(a).unwrap_or(&0) as f64;
                (o - expected).powi(2) / expected
            })
            .sum();
        p_values.push(1.0 - dist.cdf(chi2));
    }
    let mean = p_values.iter().sum::<f64>() / p_values.len() as f64;
    assert!(mean > 0.01, "{p_values:?}");
}

#[test]
fn samplers_reject_unsat() {
    let g = build_g(&instances::xor_chain(3));
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let b = Budget::unlimited();
    for sampler in [
        &mut SelfReducibleSampler::new() as &mut dyn Sampler,
        &mut HashSampler::new(),
    ] {
        assert!(matches!(
            sampler.sample(&g.formula, 0.16, &mut rng, &b),
            Err(Error::Unsatisfiable)
        ));
    }
}

#[test]
fn doubled_formula_counts() {
    let b = Budget::unlimited();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = build_g(&instances::factorization(5));
    for counter in [
        &mut HashCounter::new() as &mut dyn Counter,
        &mut ExactCounter::new(),
    ] {
        let c = count_g(&g, counter, 0.08, 0.04, &mut rng, &b).unwrap();
        assert_eq!(c.count, BigUint::from(7u32));
    }
    for spec in [instances::unsat(), instances::xor_chain(2)] {
        let c = count_g(&build_g(&spec), &mut HashCounter::new(), 0.08, 0.04, &mut rng, &b).unwrap();
        assert!(c.is_zero());
    }
}

#[test]
fn hash_counter_contract_on_larger_counts() {
    // 2^12 projected models: the hashing path, not the small-count shortcut
    let pf = ProjectedFormula::new(
        skolemfc::Cnf::new(12),
        (1..=12).map(VarId::from_index).collect(),
    );
    let (eps, seeds) = (0.8, 60);
    let mut inside = 0;
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = HashCounter::new()
            .count(&pf, eps, 0.2, &mut rng, &Budget::unlimited())
            .unwrap();
        assert!(!c.exact);
        let est = c.to_f64();
        if (4096.0 / (1.0 + eps)..=4096.0 * (1.0 + eps)).contains(&est) {
            inside += 1;
        }
    }
    assert!(inside as f64 >= 0.8 * seeds as f64 - 3.0 * (0.16 * seeds as f64).sqrt());
}

#[test]
fn exact_count_is_monotone_under_units() {
    let b = Budget::unlimited();
    for seed in 0..40 {
        let spec = instances::random_spec(4, 4, 6, 3, seed);
        let pf = spec.projected_on_outputs();
        let before = exact_count(&pf, &b).unwrap().count;
        for v in 1..=8 {
            for value in [false, true] {
                let mut cnf = pf.cnf.clone();
                cnf.add_clause(Clause::unit(VarId::from_index(v).literal(value)));
                let after = exact_count(&ProjectedFormula::new(cnf, pf.projection.clone()), &b)
                    .unwrap()
                    .count;
                assert!(after <= before);
            }
        }
    }
}
