//! Fixed workloads shared by the criterion benchmarks.

use mcmaxsat::bench::generate_instance;
use mcmaxsat::Formula;

/// Random 3-CNF with `n` variables at clause ratio 4.26, from a fixed seed.
pub fn random_3sat(n: usize, seed: u64) -> Formula {
    let m = (n as f64 * 4.26).round() as usize;
    generate_instance(n, m, 3, seed).expect("3 <= n")
}

/// Random 2-CNF with many clauses per variable, far from satisfiable.
pub fn dense_2sat(n: usize, seed: u64) -> Formula {
    generate_instance(n, 5 * n, 2, seed).expect("2 <= n")
}
