//! Randomized cross-checks of the SAT engine, enumeration, counting and
//! parsing against truth-table evaluation.

use std::collections::BTreeSet;

use proptest::prelude::*;
use skolemfc::count::{exact_count, log2_big};
use skolemfc::instances::{self, input_value};
use skolemfc::sat::{enumerate_projected, solve};
use skolemfc::{
    baseline, brute_force_output_counts, brute_force_skolem_count, build_g, parse_qdimacs,
    skolemfc, to_annotated_dimacs, to_qdimacs, Assignment, Budget, Clause, Cnf, Literal, LogBase,
    Oracles, Outcome, ProjectedFormula, SkolemConfig, VarId,
};

fn cnf_strategy(max_vars: u32) -> impl Strategy<Value = Cnf> {
    (1..=max_vars).prop_flat_map(|n| {
        let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
        prop::collection::vec(prop::collection::vec(lit, 1..=4), 0..=(3 * n as usize)).prop_map(
            move |clauses| {
                let mut cnf = Cnf::new(n);
                for c in clauses {
                    cnf.add_clause(Clause::new(
                        c.into_iter()
                            .map(|x| Literal::from_dimacs(x).unwrap())
                            .collect(),
                    ));
                }
                cnf
            },
        )
    })
}

fn all_vars(cnf: &Cnf) -> Vec<VarId> {
    (1..=cnf.num_vars).map(VarId::from_index).collect()
}

/// Every full model of `cnf`, by evaluation.
fn truth_table(cnf: &Cnf) -> Vec<Assignment> {
    let vars = all_vars(cnf);
    (0..1u64 << vars.len())
        .map(|a| Assignment::from_uint(&vars, a))
        .filter(|a| cnf.is_satisfied_by(a))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solver_agrees_with_truth_table(cnf in cnf_strategy(14)) {
        let models = truth_table(&cnf);
        let r = solve(&cnf, &[]).unwrap();
        prop_assert_eq!(r.is_sat(), !models.is_empty());
        if let Some(m) = r.model {
            prop_assert!(cnf.is_satisfied_by(&m));
        }
    }

    #[test]
    fn assumptions_agree_with_truth_table(cnf in cnf_strategy(10), bits in any::<u8>()) {
        let vars = all_vars(&cnf);
        let fixed: Vec<Literal> = vars.iter().take(3).enumerate()
            .map(|(i, v)| v.literal((bits >> i) & 1 == 1))
            .collect();
        let expected = truth_table(&cnf).iter().any(|m| fixed.iter().all(|l| l.eval(m.get(l.var).unwrap())));
        prop_assert_eq!(solve(&cnf, &fixed).unwrap().is_sat(), expected);
    }

    #[test]
    fn projected_enumeration_and_count(cnf in cnf_strategy(12), mask in any::<u16>()) {
        let projection: BTreeSet<VarId> = all_vars(&cnf)
            .into_iter()
            .filter(|v| (mask >> (v.index() - 1)) & 1 == 1)
            .collect();
        let expected: BTreeSet<Assignment> = truth_table(&cnf)
            .iter()
            .map(|m| m.restrict(&projection))
            .collect();
        let pf = ProjectedFormula::new(cnf, projection);
        let b = Budget::unlimited();
        let found: BTreeSet<Assignment> = enumerate_projected(&pf, None, &b).unwrap().models.into_iter().collect();
        prop_assert_eq!(&found, &expected);
        prop_assert_eq!(exact_count(&pf, &b).unwrap().count, (expected.len() as u64).into());
    }

    #[test]
    fn doubled_formula_projects_to_multi_output_inputs(
        n in 1..=5u32, m in 1..=5u32, clauses in 0..14usize, seed in any::<u64>()
    ) {
        let spec = instances::random_spec(n, m, clauses, 2.min((n + m) as usize), seed);
        let brute: BTreeSet<u64> = brute_force_output_counts(&spec).unwrap()
            .into_iter().enumerate().filter(|&(_, c)| c >= 2).map(|(i, _)| i as u64).collect();
        let via_g: BTreeSet<u64> = enumerate_projected(&build_g(&spec).formula, None, &Budget::unlimited())
            .unwrap().models.iter().map(|s| input_value(&spec, s)).collect();
        prop_assert_eq!(via_g, brute);
    }

    #[test]
    fn baseline_matches_brute_force(
        n in 1..=5u32, m in 1..=4u32, clauses in 0..12usize, seed in any::<u64>()
    ) {
        let spec = instances::random_spec(n, m, clauses, 3.min((n + m) as usize), seed);
        let brute = brute_force_skolem_count(&spec).unwrap();
        let run = baseline(&spec, None, LogBase::Two, &Budget::unlimited()).unwrap();
        let est = run.outcome.estimate().unwrap();
        prop_assert_eq!(est.exact.as_ref(), Some(&brute));
        prop_assert!((est.value - log2_big(&brute)).abs() <= 1e-9 * log2_big(&brute).max(1.0));
    }

    #[test]
    fn specification_text_roundtrip(
        n in 0..=5u32, m in 1..=5u32, clauses in 0..12usize, seed in any::<u64>()
    ) {
        let spec = instances::random_spec(n, m, clauses, 2.min((n + m) as usize), seed);
        prop_assert_eq!(&parse_qdimacs(&to_qdimacs(&spec)).unwrap(), &spec);
        prop_assert_eq!(&skolemfc::parse_dimacs_annotated(&to_annotated_dimacs(&spec)).unwrap(), &spec);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn skolemfc_call_shape(n in 2..=4u32, m in 1..=3u32, clauses in 0..8usize, seed in any::<u64>()) {
        let spec = instances::random_spec(n, m, clauses, 2, seed);
        let config = SkolemConfig { seed, ..SkolemConfig::default() };
        let run = skolemfc(&spec, &config, &mut Oracles::exact(), &Budget::unlimited()).unwrap();
        let Outcome::Estimate(est) = run.outcome else {
            return Err(TestCaseError::fail("exact oracles do not abort"));
        };
        if est.value == 0.0 {
            prop_assert_eq!(run.stats.count_calls, 0);
        } else {
            prop_assert!(run.stats.t as f64 <= (m as f64 * run.params.s_threshold).ceil());
            prop_assert_eq!(run.stats.count_calls, run.stats.t + 1);
        }
    }
}
