use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use mcmaxsat::bench::exact_oracle;
use mcmaxsat::sls::{local_search, SlsKind};
use mcmaxsat::{run_seeded, Assignment, Budget, EvalState, McConfig, Method, RolloutPolicy, SlsConfig, Var};
use mcmaxsat_bench::{dense_2sat, random_3sat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn flips(c: &mut Criterion) {
    let f = random_3sat(200, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let values: Vec<bool> = (0..200).map(|_| rng.gen()).collect();
    let vars: Vec<Var> = (0..4096).map(|_| Var::new(rng.gen_range(0..200))).collect();
    let mut group = c.benchmark_group("eval");
    group.throughput(Throughput::Elements(vars.len() as u64));
    group.bench_function("flip", |b| {
        let mut state = EvalState::from_values(&f, values.clone(), vec![false; 200]);
        b.iter(|| {
            for &v in &vars {
                state.flip(v).unwrap();
            }
        })
    });
    group.bench_function("bonus", |b| {
        let state = EvalState::from_values(&f, values.clone(), vec![false; 200]);
        b.iter(|| vars.iter().map(|&v| state.bonus(v).unwrap()).sum::<i64>())
    });
    group.finish();
}

fn sls(c: &mut Criterion) {
    let mut group = c.benchmark_group("local_search");
    for (name, f) in [("3sat_v200", random_3sat(200, 2)), ("2sat_v140", dense_2sat(140, 3))] {
        let n = f.num_variables();
        for kind in [SlsKind::WalkSat, SlsKind::Novelty] {
            group.throughput(Throughput::Elements(2000));
            group.bench_with_input(BenchmarkId::new(format!("{kind:?}"), name), &f, |b, f| {
                let mut rng = ChaCha8Rng::seed_from_u64(4);
                let cfg = SlsConfig::default();
                b.iter(|| local_search(kind, f, &Assignment::new(n), None, &cfg, 2000, &mut rng, &mut |_| {}))
            });
        }
    }
    group.finish();
}

fn drivers(c: &mut Criterion) {
    let f = random_3sat(70, 5);
    let mut group = c.benchmark_group("driver_200k_flips");
    group.sample_size(10);
    for method in Method::ALL {
        let cfg = McConfig {
            rollout: RolloutPolicy::walksat(SlsConfig::default()),
            budget: Budget::Flips(200_000),
            ..McConfig::default()
        };
        group.bench_function(method.name(), |b| b.iter(|| run_seeded(method, &f, &cfg, 6).unwrap().best_unsat));
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let f = random_3sat(20, 7);
    c.bench_function("exact_oracle_v20", |b| b.iter(|| exact_oracle(black_box(&f)).unwrap().0));
}

criterion_group!(benches, flips, sls, drivers, oracle);
criterion_main!(benches);
