use mcmaxsat::bench::{exact_oracle, generate_instance, BenchError, MAX_ORACLE_VARIABLES};
use mcmaxsat::sls::{walksat, SlsConfig};
use mcmaxsat::{run_seeded, Assignment, Budget, Formula, GlobalBest, McConfig, Method, RolloutPolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent minimum: decode every integer below 2^n as an assignment
/// and count falsified clauses directly.
fn brute_force(f: &Formula) -> usize {
    let n = f.num_variables();
    (0u64..1 << n)
        .map(|bits| {
            f.clauses()
                .iter()
                .filter(|c| {
                    !c.lits()
                        .iter()
                        .any(|l| ((bits >> l.var().index()) & 1 == 1) == l.is_positive())
                })
                .count()
        })
        .min()
        .unwrap()
}

#[test]
fn enumeration_matches_independent_minimum() {
    for seed in 0..20 {
        let f = generate_instance(10, 60, 3, seed).unwrap();
        let (opt, witness) = exact_oracle(&f).unwrap();
        assert_eq!(opt, brute_force(&f), "seed {seed}");
        assert_eq!(f.count_unsat(&witness.to_values().unwrap()), opt);
    }
}

#[test]
fn sampled_assignments_never_beat_the_optimum() {
    let f = generate_instance(12, 60, 2, 12).unwrap();
    let (opt, witness) = exact_oracle(&f).unwrap();
    let w = witness.to_values().unwrap();
    let recount = f.clauses().iter().filter(|c| !c.is_satisfied_by(&w)).count();
    assert_eq!(recount, opt);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10_000 {
        let values: Vec<bool> = (0..12).map(|_| rng.gen()).collect();
        assert!(f.count_unsat(&values) >= opt);
    }
}

#[test]
fn forced_optima() {
    let contradiction = Formula::from_dimacs_clauses(1, [vec![1i64], vec![-1]]).unwrap();
    assert_eq!(exact_oracle(&contradiction).unwrap().0, 1);
    let sat = Formula::from_dimacs_clauses(2, [vec![1i64, 2]]).unwrap();
    assert_eq!(exact_oracle(&sat).unwrap().0, 0);
    let empty = Formula::from_dimacs_clauses(3, Vec::<Vec<i64>>::new()).unwrap();
    assert_eq!(exact_oracle(&empty).unwrap().0, 0);
}

#[test]
fn refuses_large_instances() {
    let f = generate_instance(MAX_ORACLE_VARIABLES + 1, 10, 3, 0).unwrap();
    assert!(matches!(exact_oracle(&f), Err(BenchError::TooLarge { .. })));
}

#[test]
fn walksat_never_beats_the_optimum() {
    let f = generate_instance(18, 120, 3, 18).unwrap();
    let (opt, _) = exact_oracle(&f).unwrap();
    let g = GlobalBest::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cfg = SlsConfig::default();
    for _ in 0..200 {
        let out = walksat(&f, &Assignment::new(18), &g, &cfg, &mut rng);
        assert!(out.num_unsat >= opt);
        assert_eq!(f.count_unsat(&out.values), out.num_unsat);
    }
    assert_eq!(g.num_unsat(), Some(opt));
}

#[test]
fn every_driver_reaches_the_optimum_on_small_instances() {
    for seed in 0..4 {
        let f = generate_instance(12, 70, 3, 500 + seed).unwrap();
        let (opt, _) = exact_oracle(&f).unwrap();
        for method in Method::ALL {
            for rollout in [
                RolloutPolicy::walksat(SlsConfig::default()),
                RolloutPolicy::novelty(SlsConfig::default()),
            ] {
                let cfg = McConfig {
                    rollout,
                    budget: Budget::Flips(100_000),
                    ..McConfig::default()
                };
                let out = run_seeded(method, &f, &cfg, seed).unwrap();
                assert_eq!(out.best_unsat, opt, "{method} seed {seed}");
                assert_eq!(f.count_unsat(&out.values), out.best_unsat);
            }
        }
    }
}

#[test]
fn uctmax_with_random_rollouts_reaches_the_optimum() {
    let f = generate_instance(8, 60, 3, 8).unwrap();
    let (opt, _) = exact_oracle(&f).unwrap();
    let cfg = McConfig {
        rollout: RolloutPolicy::random(),
        budget: Budget::Rollouts(20_000),
        ..McConfig::default()
    };
    let out = run_seeded(Method::Uctmax, &f, &cfg, 0).unwrap();
    assert_eq!(out.best_unsat, opt);
}
