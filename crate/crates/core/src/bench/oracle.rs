use super::BenchError;
use crate::assignment::{Assignment, EvalState};
use crate::formula::{Formula, Var};

pub const MAX_ORACLE_VARIABLES: usize = 24;

/// Exhaustive minimum of falsified clauses over all `2^n` assignments,
/// walked in Gray-code order so each step is a single incremental flip.
/// Returns the optimum and the first assignment reaching it.
pub fn exact_oracle(formula: &Formula) -> Result<(usize, Assignment), BenchError> {
    let n = formula.num_variables();
    if n > MAX_ORACLE_VARIABLES {
        return Err(BenchError::TooLarge {
            num_variables: n,
            max: MAX_ORACLE_VARIABLES,
        });
    }
    let mut state = EvalState::from_values(formula, vec![false; n], vec![false; n]);
    let mut best = state.num_unsat();
    let mut witness = state.values().to_vec();
    for step in 1u64..(1u64 << n) {
        if best == 0 {
            break;
        }
        state.flip_unchecked(Var::new(step.trailing_zeros() as usize));
        if state.num_unsat() < best {
            best = state.num_unsat();
            witness.copy_from_slice(state.values());
        }
    }
    Ok((best, Assignment::from_values(&witness)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contradiction_costs_one() {
        let f = Formula::from_dimacs_clauses(1, [vec![1i64], vec![-1]]).unwrap();
        assert_eq!(exact_oracle(&f).unwrap().0, 1);
    }

    #[test]
    fn satisfiable_costs_zero() {
        let f = Formula::from_dimacs_clauses(2, [vec![1i64, 2]]).unwrap();
        let (opt, w) = exact_oracle(&f).unwrap();
        assert_eq!(opt, 0);
        assert_eq!(f.count_unsat(&w.to_values().unwrap()), 0);
    }

    #[test]
    fn too_large() {
        let f = Formula::from_dimacs_clauses(25, [vec![1i64]]).unwrap();
        assert!(matches!(exact_oracle(&f), Err(BenchError::TooLarge { .. })));
    }

    #[test]
    fn empty_formula() {
        let f = Formula::from_dimacs_clauses(0, Vec::<Vec<i64>>::new()).unwrap();
        let (opt, w) = exact_oracle(&f).unwrap();
        assert_eq!(opt, 0);
        assert_eq!(w.num_variables(), 0);
    }
}
