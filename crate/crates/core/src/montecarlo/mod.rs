//! Monte Carlo search drivers over the variable-by-variable assignment tree.
//!
//! A state assigns variables `1..=d` and leaves the rest free; its two
//! moves set variable `d + 1` false or true. Leaves are estimated with a
//! [`RolloutPolicy`], and every complete assignment produced anywhere is
//! offered to one [`GlobalBest`], whose content is the answer of a run.

mod nested;
mod uct;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::budget::{Budget, BudgetTracker};
use crate::formula::Formula;
use crate::rollout::RolloutPolicy;
use crate::sls::{Checkpoint, ConfigError, GlobalBest, SlsConfig};

pub use nested::{nmcs, nmcs_traced, znmcs, znmcs_traced, NestedEvent};
pub use uct::{mcts_search, nmcts, normalize, uct_score, uct_select, uct_select_values, uctmax, Action, SearchNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Uctmax,
    Nmcts,
    Nmcs,
    Znmcs,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Uctmax, Method::Nmcts, Method::Nmcs, Method::Znmcs];

    pub fn name(self) -> &'static str {
        match self {
            Method::Uctmax => "uctmax",
            Method::Nmcts => "nmcts",
            Method::Nmcs => "nmcs",
            Method::Znmcs => "znmcs",
        }
    }

    /// Whether the nesting level is a free parameter of the method.
    pub fn is_nested(self) -> bool {
        matches!(self, Method::Nmcs | Method::Znmcs)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown method `{s}` (expected uctmax, nmcts, nmcs or znmcs)"))
    }
}

pub const MAX_NESTING_LEVEL: u32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// `c` in the UCT exploration term.
    pub exploration_c: f64,
    /// Simulations per committed step in nested MCTS.
    pub simulations_per_step: u32,
    pub nmcs_level: u32,
    /// Samples per step in zero-nested search.
    pub znmcs_samples: u32,
    pub rollout: RolloutPolicy,
    pub budget: Budget,
    /// Square the satisfied-clause ratio before using it as a reward.
    pub squared_reward: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            exploration_c: 1.0,
            simulations_per_step: 100,
            nmcs_level: 1,
            znmcs_samples: 10,
            rollout: RolloutPolicy::walksat(SlsConfig::default()),
            budget: Budget::Seconds(300.0),
            squared_reward: true,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=MAX_NESTING_LEVEL).contains(&self.nmcs_level) {
            return Err(ConfigError::Invalid(format!(
                "nesting level must be between 1 and {MAX_NESTING_LEVEL}, got {}",
                self.nmcs_level
            )));
        }
        if self.simulations_per_step == 0 {
            return Err(ConfigError::Invalid("simulations per step must be positive".into()));
        }
        if self.znmcs_samples == 0 {
            return Err(ConfigError::Invalid("zero-nested sample count must be positive".into()));
        }
        if !(self.exploration_c >= 0.0 && self.exploration_c.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "exploration constant must be finite and non-negative, got {}",
                self.exploration_c
            )));
        }
        if let Some(sls) = self.rollout.sls_config() {
            sls.validate()?;
        }
        Ok(())
    }
}

/// Maps an unsatisfied-clause count to a reward in `[0, 1]`: the satisfied
/// fraction, squared when `squared` is set. A formula without clauses scores 1.
pub fn reward(formula: &Formula, num_unsat: usize, squared: bool) -> f64 {
    let m = formula.num_clauses();
    if m == 0 {
        return 1.0;
    }
    debug_assert!(num_unsat <= m);
    let base = (m - num_unsat) as f64 / m as f64;
    if squared {
        base * base
    } else {
        base
    }
}

/// A node of the assignment tree: values for variables `1..=depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchState<'f> {
    formula: &'f Formula,
    prefix: Vec<bool>,
}

impl<'f> SearchState<'f> {
    pub fn root(formula: &'f Formula) -> Self {
        SearchState {
            formula,
            prefix: Vec::new(),
        }
    }

    pub fn with_prefix(formula: &'f Formula, prefix: Vec<bool>) -> Self {
        assert!(prefix.len() <= formula.num_variables());
        SearchState { formula, prefix }
    }

    pub fn formula(&self) -> &'f Formula {
        self.formula
    }

    pub fn depth(&self) -> usize {
        self.prefix.len()
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn is_terminal(&self) -> bool {
        self.prefix.len() == self.formula.num_variables()
    }

    /// Assign the next variable false or true; empty at terminal states.
    pub fn legal_moves(&self) -> &'static [bool] {
        if self.is_terminal() {
            &[]
        } else {
            &[false, true]
        }
    }

    pub fn play(&self, value: bool) -> Self {
        assert!(!self.is_terminal(), "no moves at a terminal state");
        let mut prefix = self.prefix.clone();
        prefix.push(value);
        SearchState {
            formula: self.formula,
            prefix,
        }
    }

    pub fn to_assignment(&self) -> Assignment {
        Assignment::with_prefix(self.formula.num_variables(), &self.prefix)
    }
}

/// Result of one driver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best_unsat: usize,
    pub values: Vec<bool>,
    pub time_to_best_s: f64,
    pub elapsed_s: f64,
    pub total_flips: u64,
    pub total_rollouts: u64,
    /// One entry per improvement of the global best.
    pub checkpoints: Vec<Checkpoint>,
}

/// Shared machinery of the drivers: formula, configuration, budget and
/// random source for one run.
pub(crate) struct Searcher<'a, R: Rng + ?Sized> {
    pub formula: &'a Formula,
    pub cfg: &'a McConfig,
    pub global: &'a GlobalBest,
    pub budget: BudgetTracker,
    pub rng: &'a mut R,
}

impl<'a, R: Rng + ?Sized> Searcher<'a, R> {
    pub fn new(formula: &'a Formula, cfg: &'a McConfig, global: &'a GlobalBest, rng: &'a mut R) -> Self {
        Searcher {
            formula,
            cfg,
            global,
            budget: BudgetTracker::new(cfg.budget),
            rng,
        }
    }

    /// Out of budget, or nothing left to improve.
    pub fn should_stop(&self) -> bool {
        self.budget.exhausted() || self.global.num_unsat() == Some(0)
    }

    /// Rollout from `prefix`; returns the reward and the completed values.
    pub fn rollout(&mut self, prefix: &[bool]) -> (f64, Vec<bool>) {
        let n = self.formula.num_variables();
        if prefix.len() == n {
            return (self.score_complete(prefix), prefix.to_vec());
        }
        let partial = Assignment::with_prefix(n, prefix);
        let out = self
            .cfg
            .rollout
            .run(self.formula, &partial, self.global, self.budget.flip_cap(), self.rng);
        self.budget.record(out.flips);
        (reward(self.formula, out.num_unsat, self.cfg.squared_reward), out.values)
    }

    /// Reward of a complete assignment (a terminal state).
    pub fn score_complete(&mut self, values: &[bool]) -> f64 {
        let unsat = self.formula.count_unsat(values);
        self.global.offer(unsat, values);
        self.budget.record(0);
        reward(self.formula, unsat, self.cfg.squared_reward)
    }

    pub fn finish(mut self) -> SearchOutcome {
        if self.global.num_unsat().is_none() {
            // Degenerate budgets still report a real assignment.
            self.rollout(&[]);
        }
        let best = self.global.snapshot().expect("at least one rollout was offered");
        SearchOutcome {
            best_unsat: best.num_unsat,
            values: best.values,
            time_to_best_s: best.found_at.as_secs_f64(),
            elapsed_s: self.budget.elapsed_s(),
            total_flips: self.budget.flips(),
            total_rollouts: self.budget.rollouts(),
            checkpoints: self.global.checkpoints(),
        }
    }
}

/// Runs `method` until the budget in `cfg` runs out, restarting from the
/// root whenever a pass reaches a terminal state.
pub fn run<R: Rng + ?Sized>(
    method: Method,
    formula: &Formula,
    cfg: &McConfig,
    global: &GlobalBest,
    rng: &mut R,
) -> Result<SearchOutcome, ConfigError> {
    cfg.validate()?;
    Ok(match method {
        Method::Uctmax => uct::uctmax(formula, cfg, global, rng),
        Method::Nmcts => uct::nmcts(formula, cfg, global, rng),
        Method::Nmcs => nested::run_nested(formula, cfg, global, rng, false),
        Method::Znmcs => nested::run_nested(formula, cfg, global, rng, true),
    })
}

/// [`run`] with a fresh global best and a ChaCha8 generator seeded by `seed`.
/// Count budgets make the outcome a pure function of the arguments.
pub fn run_seeded(method: Method, formula: &Formula, cfg: &McConfig, seed: u64) -> Result<SearchOutcome, ConfigError> {
    let global = GlobalBest::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run(method, formula, cfg, &global, &mut rng)
}
