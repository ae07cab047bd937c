//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skolemfc::count::{exact_count, HashCounter};
use skolemfc::instances::{self, input_assignment, input_value};
use skolemfc::sat::enumerate_projected;
use skolemfc::{
    baseline, brute_force_output_counts, brute_force_skolem_count, build_g, cofactor_on_outputs,
    skolemfc, stopping_rule, Budget, Cnf, Counter, LimitKind, Limits, LogBase, Oracles, Outcome,
    ProjectedFormula, RunStats, SkolemConfig, Specification, VarId,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// Lower acceptance bound for a success rate `p` over `n` trials.
fn three_sigma_floor(p: f64, n: usize) -> f64 {
    p - 3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

fn s2_by_brute_force(spec: &Specification) -> BTreeSet<u64> {
    brute_force_output_counts(spec)
        .unwrap()
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c >= 2)
        .map(|(i, _)| i as u64)
        .collect()
}

fn s2_by_enumeration(spec: &Specification) -> BTreeSet<u64> {
    enumerate_projected(&build_g(spec).formula, None, &Budget::unlimited())
        .unwrap()
        .models
        .iter()
        .map(|s| input_value(spec, s))
        .collect()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let spec = instances::factorization(5);
    let mut problems = Vec::new();

    let s2 = s2_by_enumeration(&spec);
    let expected: BTreeSet<u64> = [12, 16, 18, 20, 24, 28, 30].into();
    if s2 != expected {
        problems.push(format!("S2 = {s2:?}"));
    }
    let b = Budget::unlimited();
    for (sigma, want) in [(30u64, 3u32), (16, 2)] {
        let cof = cofactor_on_outputs(&spec, &input_assignment(&spec, sigma)).unwrap();
        let got = exact_count(&cof, &b).unwrap().count;
        if got != BigUint::from(want) {
            problems.push(format!("count at {sigma} = {got}"));
        }
    }
    let counts = brute_force_output_counts(&spec).unwrap();
    let per_sigma: Vec<(u64, u64)> = expected.iter().map(|&s| (s, counts[s as usize])).collect();
    if per_sigma
        != [
            (12, 2),
            (16, 2),
            (18, 2),
            (20, 2),
            (24, 3),
            (28, 2),
            (30, 3),
        ]
    {
        problems.push(format!("per-input counts {per_sigma:?}"));
    }
    let total = brute_force_skolem_count(&spec).unwrap();
    let base = baseline(&spec, None, LogBase::E, &b).unwrap();
    let base_est = base.outcome.estimate().cloned();
    let ln = 288f64.ln();
    if total != BigUint::from(288u32) {
        problems.push(format!("brute-force count {total}"));
    }
    match base_est {
        Some(e) if e.exact == Some(BigUint::from(288u32)) && (e.value - ln).abs() <= 1e-6 => {}
        other => problems.push(format!("baseline {other:?}")),
    }
    if format!("{ln:.4}") != "5.6630" {
        problems.push(format!("ln 288 = {ln}"));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(5) {
        problems.push(format!("took {elapsed:?}"));
    }
    verdict(
        problems.is_empty(),
        if problems.is_empty() {
            format!(
                "S2 has 7 inputs, count 288, ln {ln:.6}, {:.2}s",
                elapsed.as_secs_f64()
            )
        } else {
            problems.join("; ")
        },
    )
}

/// Random specifications with `n + m ≤ 12`.
fn random_panel() -> Vec<Specification> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..500)
        .map(|i| {
            let n = rng.random_range(1..=6u32);
            let m = rng.random_range(1..=(12 - n).min(6));
            let width = rng.random_range(1..=3usize.min((n + m) as usize));
            let clauses = rng.random_range(0..=2 * (n + m) as usize);
            instances::random_spec(n, m, clauses, width, 10_000 + i)
        })
        .collect()
}

fn criterion_2(panel: &[Specification]) -> Verdict {
    let start = Instant::now();
    let mismatches = panel
        .iter()
        .filter(|spec| s2_by_brute_force(spec) != s2_by_enumeration(spec))
        .count();
    let nonempty = panel
        .iter()
        .filter(|s| !s2_by_brute_force(s).is_empty())
        .count();
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        mismatches == 0 && elapsed < 60.0,
        format!(
            "{} specs ({nonempty} with non-empty S2), {mismatches} mismatches, {elapsed:.2}s",
            panel.len()
        ),
    )
}

fn criterion_3(panel: &[Specification]) -> Verdict {
    let b = Budget::unlimited();
    let mut mismatches = 0;
    let mut worst: f64 = 0.0;
    for spec in panel {
        let brute = brute_force_skolem_count(spec).unwrap();
        let truth = LogBase::E.from_log2(skolemfc::count::log2_big(&brute));
        let run = baseline(spec, None, LogBase::E, &b).unwrap();
        let est = run.outcome.estimate().expect("no caps").clone();
        let rel = if truth == 0.0 {
            est.value.abs()
        } else {
            (est.value - truth).abs() / truth
        };
        worst = worst.max(rel);
        if rel > 1e-9 || est.exact.as_ref() != Some(&brute) {
            mismatches += 1;
        }
    }
    verdict(
        mismatches == 0,
        format!(
            "{} specs, {mismatches} mismatches, worst relative gap {worst:.1e}",
            panel.len()
        ),
    )
}

fn criterion_4() -> Verdict {
    let trials = 1000;
    let mut lines = Vec::new();
    let mut pass = true;
    for (eps, delta) in [(0.5, 0.2), (0.8, 0.4)] {
        for mu in [0.1, 0.5, 0.9] {
            let mut covered = 0;
            for seed in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(seed as u64 * 7919 + (mu * 10.0) as u64);
                let (est, _) =
                    stopping_rule(eps, delta, || f64::from(u8::from(rng.random_bool(mu)))).unwrap();
                if est >= mu * (1.0 - eps) && est <= mu * (1.0 + eps) {
                    covered += 1;
                }
            }
            let rate = covered as f64 / trials as f64;
            let floor = three_sigma_floor(1.0 - delta, trials);
            pass &= rate >= floor;
            lines.push(format!("eps {eps} mu {mu}: {rate:.3}"));
        }
    }
    verdict(pass, lines.join(", "))
}

struct CallShape {
    runs: usize,
    violations: Vec<String>,
}

impl CallShape {
    fn check(&mut self, name: &str, m: usize, s: f64, stats: &RunStats, entered_loop: bool) {
        self.runs += 1;
        let bound = (m as f64 * s).ceil() as u64;
        let ok = if entered_loop {
            stats.t <= bound && stats.count_calls == stats.t + 1
        } else {
            stats.t == 0 && stats.count_calls == 0
        };
        if !ok {
            self.violations.push(format!(
                "{name}: t {} bound {bound} count calls {}",
                stats.t, stats.count_calls
            ));
        }
    }
}

fn criterion_5(shape: &mut CallShape) -> Verdict {
    let seeds = 100;
    let eps = 0.8;
    let mut pass = true;
    let mut total_hits = 0;
    let mut total_runs = 0;
    let mut rel_errors = Vec::new();
    let mut worst = (String::new(), f64::INFINITY);
    for (name, spec) in instances::panel() {
        let truth = LogBase::E.from_log2(skolemfc::count::log2_big(
            &brute_force_skolem_count(&spec).unwrap(),
        ));
        let entered = !s2_by_brute_force(&spec).is_empty();
        let mut oracles = Oracles::exact();
        let mut hits = 0;
        for seed in 0..seeds {
            let config = SkolemConfig {
                seed,
                ..SkolemConfig::default()
            };
            let run = skolemfc(&spec, &config, &mut oracles, &Budget::unlimited()).unwrap();
            shape.check(
                &name,
                spec.num_outputs(),
                run.params.s_threshold,
                &run.stats,
                entered,
            );
            let Outcome::Estimate(est) = &run.outcome else {
                continue;
            };
            if (est.value - truth).abs() <= eps * truth {
                hits += 1;
            }
            if truth > 0.0 {
                rel_errors.push((est.value - truth).abs() / truth);
            }
        }
        let rate = hits as f64 / seeds as f64;
        if rate < worst.1 {
            worst = (name.clone(), rate);
        }
        pass &= rate >= three_sigma_floor(0.6, seeds as usize);
        total_hits += hits;
        total_runs += seeds as usize;
    }
    let mean_rel = rel_errors.iter().sum::<f64>() / rel_errors.len() as f64;
    verdict(
        pass,
        format!(
            "{} specs x {seeds} seeds, overall {:.3} within eps, lowest {} at {:.2}, mean relative error {mean_rel:.4}",
            instances::panel().len(),
            total_hits as f64 / total_runs as f64,
            worst.0,
            worst.1
        ),
    )
}

fn criterion_6(shape: &CallShape) -> Verdict {
    verdict(
        shape.violations.is_empty(),
        if shape.violations.is_empty() {
            format!(
                "{} runs, t <= ceil(m*s) and counter calls = t + 1 in all",
                shape.runs
            )
        } else {
            shape.violations.join("; ")
        },
    )
}

fn free(n: u32) -> Cnf {
    Cnf::new(n)
}

fn criterion_7() -> Verdict {
    let lit = |x: i32| skolemfc::Literal::from_dimacs(x).unwrap();
    let proj = |n: u32| (1..=n).map(VarId::from_index).collect::<BTreeSet<_>>();
    let mut one = Cnf::new(2);
    one.add_literals([lit(1)]);
    one.add_literals([lit(-2)]);
    let two = free(1);
    let mut seven = Cnf::new(3);
    seven.add_literals([lit(1), lit(2), lit(3)]);
    // 2^10 projected models among 2^12 full models
    let mut big = Cnf::new(12);
    big.add_literals([lit(11), lit(12)]);
    let cases = [
        (ProjectedFormula::new(one, proj(2)), 1u32),
        (ProjectedFormula::new(two, proj(1)), 2),
        (ProjectedFormula::new(seven, proj(3)), 7),
        (ProjectedFormula::new(big, proj(10)), 1024),
    ];
    let (eps, delta, seeds) = (0.8, 0.2, 200);
    let mut pass = true;
    let mut lines = Vec::new();
    for (pf, truth) in cases {
        let mut inside = 0;
        for seed in 0..seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = HashCounter::new()
                .count(&pf, eps, delta, &mut rng, &Budget::unlimited())
                .unwrap();
            let c = r.to_f64();
            let t = f64::from(truth);
            if c >= t / (1.0 + eps) && c <= t * (1.0 + eps) {
                inside += 1;
            }
        }
        let rate = inside as f64 / seeds as f64;
        pass &= rate >= three_sigma_floor(1.0 - delta, seeds as usize);
        lines.push(format!("{truth}: {rate:.3}"));
    }
    verdict(pass, lines.join(", "))
}

fn criterion_8(shape: &mut CallShape) -> Verdict {
    let n = 30;
    let spec = instances::wide(n);
    let limits = Limits {
        max_sat_calls: None,
        timeout: Some(Duration::from_secs(60)),
    };
    let cap = 10_000;
    let base = baseline(&spec, Some(cap), LogBase::Two, &Budget::new(limits)).unwrap();
    let base_capped = base.outcome == Outcome::Limit(LimitKind::Enumeration);

    let config = SkolemConfig {
        seed: 1,
        log_base: LogBase::Two,
        ..SkolemConfig::default()
    };
    let run = skolemfc(
        &spec,
        &config,
        &mut Oracles::hashing(),
        &Budget::new(limits),
    )
    .unwrap();
    shape.check("wide30", 2, run.params.s_threshold, &run.stats, true);
    // each input admits 4 outputs unless x1 = x2 = 0, which leaves 2
    let truth = (1u64 << n) as f64 * 1.75;
    let detail = match &run.outcome {
        Outcome::Estimate(e) => format!(
            "baseline stopped at the {cap}-input cap after {:.2}s; SkolemFC finished in {:.1}s on 2^{n} inputs, relative error {:.3}",
            base.stats.wall_time_s,
            run.stats.wall_time_s,
            (e.value - truth).abs() / truth
        ),
        other => format!("SkolemFC ended with {other:?}; baseline {:?}", base.outcome),
    };
    verdict(
        base_capped && matches!(run.outcome, Outcome::Estimate(_)),
        detail,
    )
}

fn main() -> ExitCode {
    let panel = random_panel();
    let mut shape = CallShape {
        runs: 0,
        violations: Vec::new(),
    };
    let results = [
        ("1 factorization golden", criterion_1()),
        ("2 doubled-formula projection", criterion_2(&panel)),
        ("3 baseline equals brute force", criterion_3(&panel)),
        ("4 stopping-rule coverage", criterion_4()),
        ("5 end-to-end (eps, delta)", criterion_5(&mut shape)),
        ("7 hashing-counter contract", criterion_7()),
        ("8 scalability smoke", criterion_8(&mut shape)),
    ];
    let six = criterion_6(&shape);
    let mut failed = 0;
    let mut print = |name: &str, v: &Verdict| {
        println!(
            "criterion {name}: {} ({})",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        failed += usize::from(!v.pass);
    };
    for (name, v) in &results[..5] {
        print(name, v);
    }
    print("6 call-complexity shape", &six);
    for (name, v) in &results[5..] {
        print(name, v);
    }
    if failed == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria fail");
        ExitCode::FAILURE
    }
}
