use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BenchError;
use crate::formula::Formula;

/// Uniform random k-CNF: every clause draws `k` distinct variables and
/// negates each with probability 1/2. Identical seeds give identical formulas.
pub fn generate_instance(n_vars: usize, n_clauses: usize, k: usize, seed: u64) -> Result<Formula, BenchError> {
    if k > n_vars || k == 0 {
        return Err(BenchError::InvalidShape { n_vars, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses: Vec<Vec<i64>> = (0..n_clauses)
        .map(|_| {
            index::sample(&mut rng, n_vars, k)
                .into_iter()
                .map(|v| {
                    let lit = v as i64 + 1;
                    if rng.gen_bool(0.5) {
                        -lit
                    } else {
                        lit
                    }
                })
                .collect()
        })
        .collect();
    Ok(Formula::from_dimacs_clauses(n_vars, clauses).expect("generated literals are in range"))
}

/// `rnd_v<N>_m<M>_<K>_<i>.cnf`
pub fn instance_file_name(n_vars: usize, n_clauses: usize, k: usize, i: usize) -> String {
    format!("rnd_v{n_vars}_m{n_clauses}_{k}_{i}.cnf")
}
