//! Truth assignments and the incremental evaluation state used by local
//! search and tree descents.

use thiserror::Error;

use crate::formula::{Formula, Lit, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable {0} is unassigned")]
    UnassignedVariable(Var),
    #[error("variable {0} is frozen by the search prefix")]
    FrozenVariable(Var),
}

/// A partial or complete truth assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Option<bool>>,
    num_assigned: usize,
}

impl Assignment {
    /// All variables unassigned.
    pub fn new(num_variables: usize) -> Self {
        Assignment {
            values: vec![None; num_variables],
            num_assigned: 0,
        }
    }

    pub fn from_values(values: &[bool]) -> Self {
        Assignment {
            values: values.iter().copied().map(Some).collect(),
            num_assigned: values.len(),
        }
    }

    /// The first `values.len()` variables assigned, the remaining ones free.
    pub fn with_prefix(num_variables: usize, values: &[bool]) -> Self {
        assert!(values.len() <= num_variables);
        let mut a = Assignment::new(num_variables);
        for (i, &v) in values.iter().enumerate() {
            a.set(Var::new(i), v);
        }
        a
    }

    pub fn num_variables(&self) -> usize {
        self.values.len()
    }

    pub fn num_assigned(&self) -> usize {
        self.num_assigned
    }

    pub fn is_complete(&self) -> bool {
        self.num_assigned == self.values.len()
    }

    #[inline]
    pub fn get(&self, var: Var) -> Option<bool> {
        self.values[var.index()]
    }

    pub fn is_assigned(&self, var: Var) -> bool {
        self.values[var.index()].is_some()
    }

    pub fn set(&mut self, var: Var, value: bool) {
        let slot = &mut self.values[var.index()];
        if slot.is_none() {
            self.num_assigned += 1;
        }
        *slot = Some(value);
    }

    pub fn unset(&mut self, var: Var) {
        let slot = &mut self.values[var.index()];
        if slot.is_some() {
            self.num_assigned -= 1;
        }
        *slot = None;
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, Option<bool>)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (Var::new(i), v))
    }

    pub fn free_variables(&self) -> impl Iterator<Item = Var> + '_ {
        self.iter().filter(|(_, v)| v.is_none()).map(|(var, _)| var)
    }

    /// Plain values of a complete assignment.
    pub fn to_values(&self) -> Result<Vec<bool>, EvalError> {
        self.iter()
            .map(|(var, v)| v.ok_or(EvalError::UnassignedVariable(var)))
            .collect()
    }

    /// Per-variable mask of assigned variables.
    pub fn assigned_mask(&self) -> Vec<bool> {
        self.values.iter().map(Option::is_some).collect()
    }

    /// DIMACS literal list (unassigned variables are omitted).
    pub fn to_dimacs_literals(&self) -> Vec<i64> {
        self.iter()
            .filter_map(|(var, v)| v.map(|b| var.lit(b).to_dimacs()))
            .collect()
    }
}

/// A complete assignment together with per-clause true-literal counts and
/// the set of currently falsified clauses.
///
/// Variables marked frozen belong to a search-tree prefix and refuse flips.
#[derive(Debug, Clone)]
pub struct EvalState<'f> {
    formula: &'f Formula,
    values: Vec<bool>,
    frozen: Vec<bool>,
    sat_count: Vec<u32>,
    unsat: Vec<u32>,
    unsat_pos: Vec<u32>,
}

const NOT_UNSAT: u32 = u32::MAX;

impl<'f> EvalState<'f> {
    /// Full evaluation of a complete assignment with nothing frozen.
    pub fn evaluate(formula: &'f Formula, assignment: &Assignment) -> Result<Self, EvalError> {
        let values = assignment.to_values()?;
        Ok(Self::from_values(formula, values, vec![false; formula.num_variables()]))
    }

    /// Full evaluation of `values` where `frozen[v]` marks variables that
    /// may not be flipped.
    pub fn from_values(formula: &'f Formula, values: Vec<bool>, frozen: Vec<bool>) -> Self {
        assert_eq!(values.len(), formula.num_variables());
        assert_eq!(frozen.len(), formula.num_variables());
        let m = formula.num_clauses();
        let mut state = EvalState {
            formula,
            values,
            frozen,
            sat_count: vec![0; m],
            unsat: Vec::new(),
            unsat_pos: vec![NOT_UNSAT; m],
        };
        for (ci, clause) in formula.clauses().iter().enumerate() {
            let count = clause
                .lits()
                .iter()
                .filter(|l| l.eval(state.values[l.var().index()]))
                .count() as u32;
            state.sat_count[ci] = count;
            if count == 0 {
                state.mark_unsat(ci as u32);
            }
        }
        state
    }

    pub fn formula(&self) -> &'f Formula {
        self.formula
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    #[inline]
    pub fn value(&self, var: Var) -> bool {
        self.values[var.index()]
    }

    #[inline]
    pub fn is_frozen(&self, var: Var) -> bool {
        self.frozen[var.index()]
    }

    pub fn num_free(&self) -> usize {
        self.frozen.iter().filter(|f| !**f).count()
    }

    #[inline]
    pub fn num_unsat(&self) -> usize {
        self.unsat.len()
    }

    pub fn num_sat(&self) -> usize {
        self.formula.num_clauses() - self.unsat.len()
    }

    /// Indices of falsified clauses, in no particular order.
    pub fn unsat_clauses(&self) -> &[u32] {
        &self.unsat
    }

    pub fn sat_literal_count(&self, clause: usize) -> u32 {
        self.sat_count[clause]
    }

    pub fn to_assignment(&self) -> Assignment {
        Assignment::from_values(&self.values)
    }

    fn mark_unsat(&mut self, ci: u32) {
        self.unsat_pos[ci as usize] = self.unsat.len() as u32;
        self.unsat.push(ci);
    }

    fn mark_sat(&mut self, ci: u32) {
        let pos = self.unsat_pos[ci as usize] as usize;
        self.unsat.swap_remove(pos);
        if let Some(&moved) = self.unsat.get(pos) {
            self.unsat_pos[moved as usize] = pos as u32;
        }
        self.unsat_pos[ci as usize] = NOT_UNSAT;
    }

    /// Negates `var` and updates the clauses it occurs in.
    pub fn flip(&mut self, var: Var) -> Result<(), EvalError> {
        if self.is_frozen(var) {
            return Err(EvalError::FrozenVariable(var));
        }
        self.flip_unchecked(var);
        Ok(())
    }

    /// `flip` without the frozen check. Used by enumeration, which walks
    /// every variable regardless of search prefixes.
    pub(crate) fn flip_unchecked(&mut self, var: Var) {
        let formula = self.formula;
        let old = self.values[var.index()];
        let now_true = var.lit(!old);
        let now_false = !now_true;
        self.values[var.index()] = !old;
        // Gains first so a clause holding both polarities never passes through zero.
        for &ci in formula.occurrences(now_true) {
            let c = &mut self.sat_count[ci as usize];
            *c += 1;
            if *c == 1 {
                self.mark_sat(ci);
            }
        }
        for &ci in formula.occurrences(now_false) {
            let c = &mut self.sat_count[ci as usize];
            *c -= 1;
            if *c == 0 {
                self.mark_unsat(ci);
            }
        }
    }

    /// make(v) − break(v): the decrease in falsified clauses flipping `var`
    /// would cause. The state is left untouched.
    pub fn bonus(&self, var: Var) -> Result<i64, EvalError> {
        if self.is_frozen(var) {
            return Err(EvalError::FrozenVariable(var));
        }
        Ok(self.bonus_unchecked(var))
    }

    #[inline]
    pub(crate) fn bonus_unchecked(&self, var: Var) -> i64 {
        let true_lit = var.lit(self.values[var.index()]);
        self.make_count(!true_lit) as i64 - self.break_count(true_lit) as i64
    }

    fn make_count(&self, false_lit: Lit) -> u32 {
        let mut make = 0;
        let mut last = u32::MAX;
        for &ci in self.formula.occurrences(false_lit) {
            if ci != last && self.sat_count[ci as usize] == 0 {
                make += 1;
            }
            last = ci;
        }
        make
    }

    fn break_count(&self, true_lit: Lit) -> u32 {
        let occ = self.formula.occurrences(true_lit);
        let mut brk = 0;
        let mut i = 0;
        while i < occ.len() {
            let ci = occ[i];
            let mut j = i + 1;
            while j < occ.len() && occ[j] == ci {
                j += 1;
            }
            // The clause dies iff `true_lit` supplies all of its true literals.
            let multiplicity = (j - i) as u32;
            if self.sat_count[ci as usize] == multiplicity
                && !self.formula.clause(ci as usize).is_tautology()
            {
                brk += 1;
            }
            i = j;
        }
        brk
    }
}

impl PartialEq for EvalState<'_> {
    fn eq(&self, other: &Self) -> bool {
        let mut a = self.unsat.clone();
        let mut b = other.unsat.clone();
        a.sort_unstable();
        b.sort_unstable();
        std::ptr::eq(self.formula, other.formula)
            && self.values == other.values
            && self.frozen == other.frozen
            && self.sat_count == other.sat_count
            && a == b
    }
}

/// Convenience wrapper: full evaluation of a complete assignment.
pub fn evaluate_full<'f>(
    formula: &'f Formula,
    assignment: &Assignment,
) -> Result<EvalState<'f>, EvalError> {
    EvalState::evaluate(formula, assignment)
}
