//! Stochastic local search: WalkSat and Novelty over the free variables of a
//! partial assignment, with fixed or size-dependent flip budgets and a shared
//! record of the best complete assignment seen during a run.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::{Assignment, EvalState};
use crate::formula::{Formula, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{name} must be a probability in [0, 1], got {value}")]
    NotAProbability { name: &'static str, value: f64 },
    #[error("dynamic flip budget needs a positive weight and exponent, got w={weight}, e={exponent}")]
    BadDynamicBudget { weight: f64, exponent: f64 },
    #[error("{0}")]
    Invalid(String),
}

/// Number of flips one local search call may perform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FlipBudget {
    Fixed(u64),
    /// `round(weight * u^exponent)` where `u` counts the flippable variables.
    Dynamic { weight: f64, exponent: f64 },
}

impl FlipBudget {
    pub fn dynamic(weight: f64) -> Self {
        FlipBudget::Dynamic {
            weight,
            exponent: 1.0,
        }
    }

    pub fn resolve(&self, free_variables: usize) -> u64 {
        resolve_flip_budget(*self, free_variables)
    }
}

impl std::str::FromStr for FlipBudget {
    type Err = String;

    /// `fixed:<F>` or `dynamic:<W>[:<E>]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || format!("invalid flip budget `{s}` (expected fixed:<F> or dynamic:<W>[:<E>])");
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["fixed", f] => f.parse().map(FlipBudget::Fixed).map_err(|_| err()),
            ["dynamic", w] => Ok(FlipBudget::dynamic(w.parse().map_err(|_| err())?)),
            ["dynamic", w, e] => Ok(FlipBudget::Dynamic {
                weight: w.parse().map_err(|_| err())?,
                exponent: e.parse().map_err(|_| err())?,
            }),
            _ => Err(err()),
        }
    }
}

impl Default for FlipBudget {
    fn default() -> Self {
        FlipBudget::dynamic(2.0)
    }
}

/// Resolves a flip budget for `free_variables` flippable variables.
/// Dynamic budgets round half up.
pub fn resolve_flip_budget(budget: FlipBudget, free_variables: usize) -> u64 {
    match budget {
        FlipBudget::Fixed(f) => f,
        FlipBudget::Dynamic { weight, exponent } => {
            let raw = weight * (free_variables as f64).powf(exponent);
            (raw + 0.5).floor().max(0.0) as u64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SlsKind {
    WalkSat,
    Novelty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlsConfig {
    /// Probability of a random-walk step instead of the greedy choice.
    pub epsilon1: f64,
    /// Novelty: the second-best variable replaces a just-flipped best one
    /// with probability `1 - epsilon2`.
    pub epsilon2: f64,
    /// Per-variable probability of ignoring the global best at initialization.
    pub epsilon_init: f64,
    pub flip_budget: FlipBudget,
    /// Report the best state visited rather than the final one.
    pub return_best_ever: bool,
    pub init_from_global_best: bool,
}

impl Default for SlsConfig {
    fn default() -> Self {
        SlsConfig {
            epsilon1: 0.1,
            epsilon2: 0.5,
            epsilon_init: 0.1,
            flip_budget: FlipBudget::default(),
            return_best_ever: true,
            init_from_global_best: true,
        }
    }
}

impl SlsConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [
            ("epsilon1", self.epsilon1),
            ("epsilon2", self.epsilon2),
            ("epsilon_init", self.epsilon_init),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::NotAProbability { name, value });
            }
        }
        if let FlipBudget::Dynamic { weight, exponent } = self.flip_budget {
            if !(weight > 0.0 && exponent > 0.0 && weight.is_finite() && exponent.is_finite()) {
                return Err(ConfigError::BadDynamicBudget { weight, exponent });
            }
        }
        Ok(())
    }
}

/// The best complete assignment found so far.
#[derive(Debug, Clone, PartialEq)]
pub struct BestSolution {
    pub values: Vec<bool>,
    pub num_unsat: usize,
    pub found_at: Duration,
    pub update_count: u64,
}

/// One improvement of the global best.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub elapsed_s: f64,
    pub best_unsat: usize,
}

#[derive(Debug, Default)]
struct BestInner {
    best: Option<BestSolution>,
    history: Vec<Checkpoint>,
}

/// Run-wide best solution, shared by every rollout of a run. Only strict
/// improvements are accepted, so `num_unsat` never increases.
#[derive(Debug)]
pub struct GlobalBest {
    started: Instant,
    inner: Mutex<BestInner>,
}

impl Default for GlobalBest {
    fn default() -> Self {
        Self::new()
    }
}

impl GlobalBest {
    pub fn new() -> Self {
        GlobalBest {
            started: Instant::now(),
            inner: Mutex::new(BestInner::default()),
        }
    }

    pub fn started(&self) -> Instant {
        self.started
    }

    /// Replaces the stored solution when `num_unsat` is strictly better.
    pub fn offer(&self, num_unsat: usize, values: &[bool]) -> bool {
        let mut inner = self.inner.lock().unwrap();
        if inner.best.as_ref().is_some_and(|b| b.num_unsat <= num_unsat) {
            return false;
        }
        let found_at = self.started.elapsed();
        let update_count = inner.best.as_ref().map_or(1, |b| b.update_count + 1);
        inner.best = Some(BestSolution {
            values: values.to_vec(),
            num_unsat,
            found_at,
            update_count,
        });
        inner.history.push(Checkpoint {
            elapsed_s: found_at.as_secs_f64(),
            best_unsat: num_unsat,
        });
        true
    }

    pub fn num_unsat(&self) -> Option<usize> {
        self.inner.lock().unwrap().best.as_ref().map(|b| b.num_unsat)
    }

    pub fn snapshot(&self) -> Option<BestSolution> {
        self.inner.lock().unwrap().best.clone()
    }

    /// Improvement history in chronological order.
    pub fn checkpoints(&self) -> Vec<Checkpoint> {
        self.inner.lock().unwrap().history.clone()
    }

    fn values(&self) -> Option<Vec<bool>> {
        self.inner
            .lock()
            .unwrap()
            .best
            .as_ref()
            .map(|b| b.values.clone())
    }
}

/// Completes `prefix` for a local search start. Free variables copy the
/// global best with probability `1 - epsilon_init` (when enabled and a
/// global best exists) and are uniformly random otherwise.
pub fn init_assignment<R: Rng + ?Sized>(
    formula: &Formula,
    prefix: &Assignment,
    global: Option<&GlobalBest>,
    cfg: &SlsConfig,
    rng: &mut R,
) -> Assignment {
    Assignment::from_values(&init_values(formula, prefix, global, cfg, rng))
}

fn init_values<R: Rng + ?Sized>(
    formula: &Formula,
    prefix: &Assignment,
    global: Option<&GlobalBest>,
    cfg: &SlsConfig,
    rng: &mut R,
) -> Vec<bool> {
    debug_assert_eq!(prefix.num_variables(), formula.num_variables());
    let guide = if cfg.init_from_global_best {
        global.and_then(GlobalBest::values)
    } else {
        None
    };
    prefix
        .iter()
        .map(|(var, v)| match (v, &guide) {
            (Some(b), _) => b,
            (None, Some(g)) => {
                if cfg.epsilon_init > 0.0 && rng.gen::<f64>() < cfg.epsilon_init {
                    rng.gen()
                } else {
                    g[var.index()]
                }
            }
            (None, None) => rng.gen(),
        })
        .collect()
}

/// Result of one local search call.
#[derive(Debug, Clone, PartialEq)]
pub struct SlsOutcome {
    pub num_unsat: usize,
    pub values: Vec<bool>,
    pub flips: u64,
    /// Set when the search stopped early because every falsified clause
    /// consisted of frozen variables only.
    pub stalled: bool,
}

/// One executed flip, reported to local search observers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipEvent {
    pub var: Var,
    /// False for random-walk steps.
    pub greedy: bool,
    /// Distinct free variables of the clause the flip was chosen from.
    pub candidates: usize,
    pub num_unsat: usize,
}

/// WalkSat with the budget resolved for the free variables of `prefix`.
pub fn walksat<R: Rng + ?Sized>(
    formula: &Formula,
    prefix: &Assignment,
    global: &GlobalBest,
    cfg: &SlsConfig,
    rng: &mut R,
) -> SlsOutcome {
    let limit = cfg.flip_budget.resolve(prefix.num_variables() - prefix.num_assigned());
    local_search(SlsKind::WalkSat, formula, prefix, Some(global), cfg, limit, rng, &mut |_| {})
}

/// Novelty with the budget resolved for the free variables of `prefix`.
pub fn novelty<R: Rng + ?Sized>(
    formula: &Formula,
    prefix: &Assignment,
    global: &GlobalBest,
    cfg: &SlsConfig,
    rng: &mut R,
) -> SlsOutcome {
    let limit = cfg.flip_budget.resolve(prefix.num_variables() - prefix.num_assigned());
    local_search(SlsKind::Novelty, formula, prefix, Some(global), cfg, limit, rng, &mut |_| {})
}

/// Runs at most `flip_limit` flips over the variables left free by
/// `prefix`, then offers the reported assignment to `global`.
///
/// Each step picks a falsified clause uniformly at random. With probability
/// `epsilon1` a random free variable of it is flipped; otherwise the free
/// variable with the largest bonus (lowest index on ties). Novelty swaps in
/// the runner-up when the best one was the last variable flipped.
#[allow(clippy::too_many_arguments)]
pub fn local_search<R: Rng + ?Sized>(
    kind: SlsKind,
    formula: &Formula,
    prefix: &Assignment,
    global: Option<&GlobalBest>,
    cfg: &SlsConfig,
    flip_limit: u64,
    rng: &mut R,
    observer: &mut dyn FnMut(&FlipEvent),
) -> SlsOutcome {
    let values = init_values(formula, prefix, global, cfg, rng);
    let mut state = EvalState::from_values(formula, values, prefix.assigned_mask());

    let mut best_unsat = state.num_unsat();
    let mut best_values = state.values().to_vec();
    let mut last_flipped: Option<Var> = None;
    let mut candidates: Vec<(Var, i64)> = Vec::new();
    let mut flips = 0u64;
    let mut stalled = false;

    while flips < flip_limit && state.num_unsat() > 0 {
        let unsat = state.unsat_clauses();
        let mut clause = unsat[rng.gen_range(0..unsat.len())] as usize;
        collect_free(&state, clause, &mut candidates);
        if candidates.is_empty() {
            // Fully frozen clause: resample among the ones that still have a move.
            let movable: Vec<u32> = unsat
                .iter()
                .copied()
                .filter(|&ci| {
                    formula
                        .clause(ci as usize)
                        .lits()
                        .iter()
                        .any(|l| !state.is_frozen(l.var()))
                })
                .collect();
            if movable.is_empty() {
                stalled = true;
                break;
            }
            clause = movable[rng.gen_range(0..movable.len())] as usize;
            collect_free(&state, clause, &mut candidates);
        }

        let noisy = cfg.epsilon1 > 0.0 && rng.gen::<f64>() < cfg.epsilon1;
        let var = if noisy {
            candidates[rng.gen_range(0..candidates.len())].0
        } else {
            for c in candidates.iter_mut() {
                c.1 = state.bonus_unchecked(c.0);
            }
            let (best, second) = best_two(&candidates);
            let avoid = kind == SlsKind::Novelty
                && Some(best) == last_flipped
                && 1.0 - cfg.epsilon2 > 0.0
                && rng.gen::<f64>() < 1.0 - cfg.epsilon2;
            match (avoid, second) {
                (true, Some(s)) => s,
                _ => best,
            }
        };

        state.flip_unchecked(var);
        flips += 1;
        last_flipped = Some(var);
        observer(&FlipEvent {
            var,
            greedy: !noisy,
            candidates: candidates.len(),
            num_unsat: state.num_unsat(),
        });
        if state.num_unsat() < best_unsat {
            best_unsat = state.num_unsat();
            best_values.copy_from_slice(state.values());
        }
    }

    let outcome = if cfg.return_best_ever {
        SlsOutcome {
            num_unsat: best_unsat,
            values: best_values,
            flips,
            stalled,
        }
    } else {
        SlsOutcome {
            num_unsat: state.num_unsat(),
            values: state.values().to_vec(),
            flips,
            stalled,
        }
    };
    if let Some(g) = global {
        g.offer(outcome.num_unsat, &outcome.values);
    }
    outcome
}

/// Distinct free variables of a clause, in ascending order.
fn collect_free(state: &EvalState<'_>, clause: usize, out: &mut Vec<(Var, i64)>) {
    out.clear();
    for l in state.formula().clause(clause).lits() {
        let v = l.var();
        if !state.is_frozen(v) && !out.iter().any(|c| c.0 == v) {
            out.push((v, 0));
        }
    }
    out.sort_unstable_by_key(|c| c.0);
}

/// Best and second-best candidates by bonus, ties to the lower variable.
/// `candidates` must be sorted by variable and non-empty.
fn best_two(candidates: &[(Var, i64)]) -> (Var, Option<Var>) {
    let mut best = candidates[0];
    let mut second: Option<(Var, i64)> = None;
    for &c in &candidates[1..] {
        if c.1 > best.1 {
            second = Some(best);
            best = c;
        } else if second.is_none_or(|s| c.1 > s.1) {
            second = Some(c);
        }
    }
    (best.0, second.map(|s| s.0))
}
