//! Anytime MaxSAT solving with Monte Carlo search over variable assignments,
//! using stochastic local search (WalkSat, Novelty) or simple heuristics to
//! estimate leaf states.
//!
//! The drivers are [`montecarlo::uctmax`], [`montecarlo::nmcts`] and the
//! nested searches run through [`montecarlo::run`]. The [`bench`] module
//! holds the experiment harness: instance generation, an exhaustive oracle
//! for small formulas, grid runs and CSV output.

pub mod assignment;
pub mod bench;
pub mod budget;
pub mod formula;
pub mod montecarlo;
pub mod rollout;
pub mod sls;

pub use assignment::{evaluate_full, Assignment, EvalError, EvalState};
pub use budget::{Budget, BudgetTracker};
pub use formula::{parse_dimacs, Clause, Formula, FormulaError, Lit, ParseError, Var};
pub use montecarlo::{reward, run_seeded, McConfig, Method, SearchOutcome, SearchState};
pub use rollout::{RolloutKind, RolloutPolicy};
pub use sls::{
    resolve_flip_budget, BestSolution, Checkpoint, ConfigError, FlipBudget, GlobalBest, SlsConfig, SlsKind,
};
