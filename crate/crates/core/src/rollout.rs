//! Playout policies that complete a partial assignment.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::formula::{Formula, Var};
use crate::sls::{local_search, ConfigError, GlobalBest, SlsConfig, SlsKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RolloutKind {
    Random,
    H1,
    H2,
    H3,
    WalkSat,
    Novelty,
}

impl RolloutKind {
    pub const ALL: [RolloutKind; 6] = [
        RolloutKind::Random,
        RolloutKind::H1,
        RolloutKind::H2,
        RolloutKind::H3,
        RolloutKind::WalkSat,
        RolloutKind::Novelty,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RolloutKind::Random => "random",
            RolloutKind::H1 => "h1",
            RolloutKind::H2 => "h2",
            RolloutKind::H3 => "h3",
            RolloutKind::WalkSat => "walksat",
            RolloutKind::Novelty => "novelty",
        }
    }

    pub fn is_sls(self) -> bool {
        matches!(self, RolloutKind::WalkSat | RolloutKind::Novelty)
    }
}

impl fmt::Display for RolloutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RolloutKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RolloutKind::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown rollout `{s}` (expected random, h1, h2, h3, walksat or novelty)"))
    }
}

/// Variable ordering used by the occurrence heuristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeuristicOrder {
    /// Index order.
    H1,
    /// Most occurrences (either polarity) first.
    H2,
    /// Largest single-polarity occurrence count first.
    H3,
}

/// How a leaf state is completed and scored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutPolicy {
    kind: RolloutKind,
    sls: Option<SlsConfig>,
    invert_polarity_rule: bool,
}

impl RolloutPolicy {
    pub fn new(
        kind: RolloutKind,
        sls: Option<SlsConfig>,
        invert_polarity_rule: bool,
    ) -> Result<Self, ConfigError> {
        if kind.is_sls() != sls.is_some() {
            return Err(ConfigError::Invalid(format!(
                "rollout {kind} {} a local search configuration",
                if kind.is_sls() { "requires" } else { "does not take" }
            )));
        }
        if let Some(cfg) = &sls {
            cfg.validate()?;
        }
        Ok(RolloutPolicy {
            kind,
            sls,
            invert_polarity_rule,
        })
    }

    pub fn random() -> Self {
        RolloutPolicy {
            kind: RolloutKind::Random,
            sls: None,
            invert_polarity_rule: false,
        }
    }

    pub fn heuristic(order: HeuristicOrder, invert_polarity_rule: bool) -> Self {
        let kind = match order {
            HeuristicOrder::H1 => RolloutKind::H1,
            HeuristicOrder::H2 => RolloutKind::H2,
            HeuristicOrder::H3 => RolloutKind::H3,
        };
        RolloutPolicy {
            kind,
            sls: None,
            invert_polarity_rule,
        }
    }

    pub fn walksat(cfg: SlsConfig) -> Self {
        RolloutPolicy {
            kind: RolloutKind::WalkSat,
            sls: Some(cfg),
            invert_polarity_rule: false,
        }
    }

    pub fn novelty(cfg: SlsConfig) -> Self {
        RolloutPolicy {
            kind: RolloutKind::Novelty,
            sls: Some(cfg),
            invert_polarity_rule: false,
        }
    }

    pub fn kind(&self) -> RolloutKind {
        self.kind
    }

    pub fn sls_config(&self) -> Option<&SlsConfig> {
        self.sls.as_ref()
    }

    pub fn invert_polarity_rule(&self) -> bool {
        self.invert_polarity_rule
    }

    /// Completes `prefix`, scores the completion and offers it to `global`.
    ///
    /// `flip_cap` bounds the flips of SLS rollouts below their configured
    /// budget; other policies ignore it.
    pub fn run<R: Rng + ?Sized>(
        &self,
        formula: &Formula,
        prefix: &Assignment,
        global: &GlobalBest,
        flip_cap: Option<u64>,
        rng: &mut R,
    ) -> RolloutOutcome {
        let (values, flips) = match (self.kind, &self.sls) {
            (RolloutKind::WalkSat | RolloutKind::Novelty, Some(cfg)) => {
                let kind = if self.kind == RolloutKind::WalkSat {
                    SlsKind::WalkSat
                } else {
                    SlsKind::Novelty
                };
                let free = prefix.num_variables() - prefix.num_assigned();
                let mut limit = cfg.flip_budget.resolve(free);
                if let Some(cap) = flip_cap {
                    limit = limit.min(cap);
                }
                let out = local_search(kind, formula, prefix, Some(global), cfg, limit, rng, &mut |_| {});
                return RolloutOutcome {
                    num_unsat: out.num_unsat,
                    values: out.values,
                    flips: out.flips,
                };
            }
            (RolloutKind::Random, _) => (rollout_random(formula, prefix, rng), 0),
            (RolloutKind::H1, _) => (rollout_h1(formula, prefix, self.invert_polarity_rule), 0),
            (RolloutKind::H2, _) => (rollout_h2(formula, prefix, self.invert_polarity_rule), 0),
            (RolloutKind::H3, _) => (rollout_h3(formula, prefix, self.invert_polarity_rule), 0),
            _ => unreachable!("SLS rollout without configuration"),
        };
        let values = values.to_values().expect("rollouts complete the assignment");
        let num_unsat = formula.count_unsat(&values);
        global.offer(num_unsat, &values);
        RolloutOutcome {
            num_unsat,
            values,
            flips,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RolloutOutcome {
    pub num_unsat: usize,
    pub values: Vec<bool>,
    pub flips: u64,
}

/// Sets every free variable to a fair coin flip, in index order.
pub fn rollout_random<R: Rng + ?Sized>(formula: &Formula, prefix: &Assignment, rng: &mut R) -> Assignment {
    debug_assert_eq!(formula.num_variables(), prefix.num_variables());
    let mut out = prefix.clone();
    for var in prefix.free_variables() {
        out.set(var, rng.gen());
    }
    out
}

pub fn rollout_h1(formula: &Formula, prefix: &Assignment, invert_polarity_rule: bool) -> Assignment {
    rollout_heuristic(formula, prefix, HeuristicOrder::H1, invert_polarity_rule)
}

pub fn rollout_h2(formula: &Formula, prefix: &Assignment, invert_polarity_rule: bool) -> Assignment {
    rollout_heuristic(formula, prefix, HeuristicOrder::H2, invert_polarity_rule)
}

pub fn rollout_h3(formula: &Formula, prefix: &Assignment, invert_polarity_rule: bool) -> Assignment {
    rollout_heuristic(formula, prefix, HeuristicOrder::H3, invert_polarity_rule)
}

/// Polarity rule shared by the heuristics: a variable whose positive
/// literal occurs more often than its negative one is set false, any other
/// variable true. `invert` swaps the two outcomes.
pub fn heuristic_value(formula: &Formula, var: Var, invert: bool) -> bool {
    let value = formula.pos_count(var) <= formula.neg_count(var);
    value ^ invert
}

/// Order in which a heuristic assigns the free variables of `prefix`.
/// Ties go to the lower index.
pub fn heuristic_order(formula: &Formula, prefix: &Assignment, order: HeuristicOrder) -> Vec<Var> {
    let mut vars: Vec<Var> = prefix.free_variables().collect();
    match order {
        HeuristicOrder::H1 => {}
        HeuristicOrder::H2 => vars.sort_by_key(|&v| std::cmp::Reverse(formula.occurrence_count(v))),
        HeuristicOrder::H3 => vars.sort_by_key(|&v| {
            std::cmp::Reverse(formula.pos_count(v).max(formula.neg_count(v)))
        }),
    }
    vars
}

pub fn rollout_heuristic(
    formula: &Formula,
    prefix: &Assignment,
    order: HeuristicOrder,
    invert_polarity_rule: bool,
) -> Assignment {
    let mut out = prefix.clone();
    for var in heuristic_order(formula, prefix, order) {
        out.set(var, heuristic_value(formula, var, invert_polarity_rule));
    }
    out
}
